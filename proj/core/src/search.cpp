#include "dsearch/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "dsearch/error.hpp"
#include "dsearch/parallel.hpp"

namespace dsearch {

Algorithm parse_algorithm(std::string_view name) {
  if (name == "dsearch") return Algorithm::kDSearch;
  if (name == "dsearch-r") return Algorithm::kDSearchR;
  if (name == "svdd") return Algorithm::kSvdd;
  if (name == "smc") return Algorithm::kSmc;
  if (name == "best-of-n") return Algorithm::kBestOfN;
  if (name == "none" || name == "pretrained") return Algorithm::kNone;
  fail(ErrorKind::kInvalidConfiguration, "unknown algorithm '" + std::string(name) + "'",
       "plan.algorithm");
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDSearch: return "dsearch";
    case Algorithm::kDSearchR: return "dsearch-r";
    case Algorithm::kSvdd: return "svdd";
    case Algorithm::kSmc: return "smc";
    case Algorithm::kBestOfN: return "best-of-n";
    case Algorithm::kNone: return "none";
  }
  return "none";
}

ResamplingScheme parse_resampling(std::string_view name) {
  if (name == "multinomial") return ResamplingScheme::kMultinomial;
  if (name == "systematic") return ResamplingScheme::kSystematic;
  fail(ErrorKind::kInvalidConfiguration, "unknown resampling scheme '" + std::string(name) + "'",
       "plan.smc_resampling");
}

std::string_view to_string(ResamplingScheme scheme) {
  return scheme == ResamplingScheme::kMultinomial ? "multinomial" : "systematic";
}

namespace {

int drop_count(double resample_rate, int beams) {
  return static_cast<int>(std::ceil(resample_rate * beams - 1e-9));
}

void require_fixed_beams(const SearchPlan& plan) {
  if (plan.beams.kind != BeamKind::kNone) {
    fail(ErrorKind::kInvalidConfiguration,
         std::string(to_string(plan.algorithm)) + " uses a fixed beam count; set beam.kind=none",
         "beam.kind");
  }
}

}  // namespace

void SearchPlan::validate() const {
  beams.validate();
  search_set.validate();
  estimator.validate();
  if (workers < 1) fail(ErrorKind::kInvalidConfiguration, "workers must be >= 1", "workers");
  switch (algorithm) {
    case Algorithm::kDSearch:
      if (child_budget < 1) {
        fail(ErrorKind::kInvalidConfiguration, "child budget C must be >= 1", "plan.child_budget");
      }
      break;
    case Algorithm::kDSearchR: {
      require_fixed_beams(*this);
      if (child_budget < 1) {
        fail(ErrorKind::kInvalidConfiguration, "child budget C must be >= 1", "plan.child_budget");
      }
      if (!(resample_rate >= 0.0 && resample_rate < 1.0)) {
        fail(ErrorKind::kInvalidConfiguration, "resample rate must lie in [0, 1)",
             "plan.resample_rate");
      }
      if (!literal_quantile && drop_count(resample_rate, beams.initial) >= beams.initial) {
        fail(ErrorKind::kInvalidConfiguration, "ceil(r_r b) must be < b", "plan.resample_rate");
      }
      break;
    }
    case Algorithm::kSvdd:
      require_fixed_beams(*this);
      if (duplication < 1) {
        fail(ErrorKind::kInvalidConfiguration, "duplication must be >= 1", "plan.duplication");
      }
      break;
    case Algorithm::kSmc:
      require_fixed_beams(*this);
      if (!(estimator.alpha > 0.0)) {
        fail(ErrorKind::kInvalidConfiguration, "SMC needs alpha > 0", "estimator.alpha");
      }
      break;
    case Algorithm::kBestOfN:
      if (best_of_n < 1) fail(ErrorKind::kInvalidConfiguration, "N must be >= 1", "plan.best_of_n");
      break;
    case Algorithm::kNone:
      break;
  }
}

int SearchPlan::initial_beams() const {
  switch (algorithm) {
    case Algorithm::kBestOfN: return best_of_n * beams.final;
    case Algorithm::kNone: return beams.final;
    default: return beams.initial;
  }
}

std::size_t greedy_select(std::span<const BeamNode> children) {
  if (children.empty()) fail(ErrorKind::kInvalidInput, "greedy_select: no children");
  std::size_t best = 0;
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (!children[i].value) fail(ErrorKind::kInvalidInput, "greedy_select: child without value");
    if (*children[i].value > *children[best].value) best = i;
  }
  return best;
}

std::vector<std::size_t> selection_top_b(std::span<const BeamNode> nodes, int b_next) {
  if (b_next < 0 || static_cast<std::size_t>(b_next) > nodes.size()) {
    fail(ErrorKind::kInvalidConfiguration, "selection: b_next exceeds the number of nodes");
  }
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const auto& n : nodes) {
    if (!n.value) fail(ErrorKind::kInvalidInput, "selection: node without value");
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *nodes[a].value > *nodes[b].value;
  });
  order.resize(static_cast<std::size_t>(b_next));
  std::sort(order.begin(), order.end());
  std::set<int> parents;
  for (std::size_t i : order) {
    if (nodes[i].parent >= 0 && !parents.insert(nodes[i].parent).second) {
      fail(ErrorKind::kStateCorruption, "selection retained two nodes with the same parent");
    }
  }
  return order;
}

std::vector<double> replacement_weights(std::span<const double> retained_values) {
  if (retained_values.empty()) fail(ErrorKind::kInvalidInput, "no retained beams to resample from");
  const double vmax = *std::max_element(retained_values.begin(), retained_values.end());
  const double scale = std::abs(vmax);
  std::vector<double> w(retained_values.size(), 1.0);
  if (scale > 0.0) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp((retained_values[i] - vmax) / scale);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

ResampleDecision plan_replacements(std::span<const double> values, double resample_rate,
                                   bool literal_quantile) {
  const auto b = values.size();
  ResampleDecision d;
  if (literal_quantile) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(b) - 1.0) * (1.0 - resample_rate);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, b - 1);
    const double threshold = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    for (std::size_t j = 0; j < b; ++j) {
      (values[j] >= threshold ? d.retained : d.dropped).push_back(j);
    }
  } else {
    const auto n_drop = static_cast<std::size_t>(drop_count(resample_rate, static_cast<int>(b)));
    if (n_drop >= b) fail(ErrorKind::kInvalidConfiguration, "ceil(r_r b) must be < b");
    std::vector<std::size_t> order(b);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return values[a] > values[c]; });
    d.retained.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_drop));
    d.dropped.assign(order.end() - static_cast<std::ptrdiff_t>(n_drop), order.end());
    std::sort(d.retained.begin(), d.retained.end());
    std::sort(d.dropped.begin(), d.dropped.end());
  }
  std::vector<double> kept;
  kept.reserve(d.retained.size());
  for (std::size_t j : d.retained) kept.push_back(values[j]);
  d.weights = replacement_weights(kept);
  return d;
}

std::vector<double> RunReport::rewards() const {
  std::vector<double> out;
  for (const auto& f : finals) out.push_back(f.reward);
  return out;
}

std::vector<State> RunReport::states() const {
  std::vector<State> out;
  for (const auto& f : finals) out.push_back(f.state);
  return out;
}

std::vector<int> RunReport::lineages() const {
  std::vector<int> out;
  for (const auto& f : finals) out.push_back(f.lineage);
  return out;
}

SearchSet plan_search_set(const SearchPlan& plan, int steps, std::uint64_t seed) {
  switch (plan.algorithm) {
    case Algorithm::kBestOfN:
    case Algorithm::kNone:
      return SearchSet(std::vector<bool>(static_cast<std::size_t>(steps), false));
    case Algorithm::kSvdd:
      return SearchSet::all(steps);
    case Algorithm::kSmc:
      if (plan.smc_resample_every_step) return SearchSet::all(steps);
      [[fallthrough]];
    default: {
      Rng rng(StreamKey{seed, StreamPurpose::kSearchSet, 0, 0, 0, 0});
      return generate_search_set(plan.search_set, steps, rng);
    }
  }
}

std::vector<StepRecord> predict_schedule(const SearchPlan& plan, int steps, std::uint64_t seed) {
  plan.validate();
  const SearchSet A = plan_search_set(plan, steps, seed);
  std::vector<StepRecord> out;
  int b = plan.initial_beams();
  for (int t = steps; t >= 1; --t) {
    StepRecord r;
    r.t = t;
    r.s = steps - t;
    r.beams = b;
    r.next_beams = b;
    // SMC resampling steps do not expand the tree.
    const bool expands = A.contains(t) && plan.algorithm != Algorithm::kSmc;
    r.searched = A.contains(t);
    if (expands) {
      switch (plan.algorithm) {
        case Algorithm::kDSearch:
          r.width = tree_width(plan.child_budget, b);
          r.next_beams = std::min(b, beam_width(plan.beams, r.s + 1, steps));
          break;
        case Algorithm::kDSearchR:
          r.width = tree_width(plan.child_budget, b);
          break;
        case Algorithm::kSvdd:
          r.width = plan.duplication;
          break;
        default:
          break;
      }
    }
    b = r.next_beams;
    out.push_back(r);
  }
  return out;
}

std::int64_t predicted_denoiser_calls(std::span<const StepRecord> steps) {
  std::int64_t total = 0;
  for (const auto& r : steps) total += static_cast<std::int64_t>(r.beams) * r.width;
  return total;
}

namespace {

struct Beam {
  State state;
  int lineage = 0;
  int parent = -1;
};

[[noreturn]] void rethrow_with_context(const Error& e, int t, std::size_t beam) {
  throw Error(e.kind(), "(t=" + std::to_string(t) + ", beam=" + std::to_string(beam) + ") " + e.what(),
              e.field());
}

// Shared run state for all algorithms.
class Engine {
 public:
  Engine(const SearchPlan& plan, const DenoiserModel& model, const RewardOracle& reward,
         std::uint64_t seed)
      : plan_(plan),
        model_(model),
        reward_(reward),
        estimator_(plan.estimator, model, reward),
        seed_(seed),
        steps_(model.steps()) {
    plan_.validate();
    report_.algorithm = plan.algorithm;
    report_.seed = seed;
    report_.search_set = plan_search_set(plan, steps_, seed);
  }

  int steps() const { return steps_; }
  const SearchSet& search_set() const { return report_.search_set; }
  CallCounters& counters() { return counters_; }

  std::vector<Beam> init_beams(int count) {
    std::vector<Beam> beams(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
      Rng rng(StreamKey{seed_, StreamPurpose::kPrior, steps_, j, 0, 0});
      beams[static_cast<std::size_t>(j)] = Beam{model_.prior_sample(rng), j, -1};
    }
    return beams;
  }

  // One reverse draw per beam from stream (t, j, 0).
  void advance(std::vector<Beam>& beams, int t) {
    parallel_for(beams.size(), plan_.workers, [&](std::size_t j) {
      try {
        Rng rng(child_key(t, j, 0));
        beams[j].state = std::move(model_.reverse_children(beams[j].state, t, std::span<Rng>(&rng, 1)).front());
        beams[j].parent = static_cast<int>(j);
      } catch (const Error& e) {
        rethrow_with_context(e, t, j);
      }
    });
    counters_.denoiser_calls.fetch_add(static_cast<std::int64_t>(beams.size()));
  }

  // Expand every beam into `width` children, score them at time t-1 and keep
  // each beam's argmax child. Returns one node per beam, parent = beam index.
  std::vector<BeamNode> expand_and_select(const std::vector<Beam>& beams, int t, int width) {
    const std::size_t b = beams.size();
    const auto w = static_cast<std::size_t>(width);
    std::vector<BeamNode> children(b * w);
    parallel_for(b * w, plan_.workers, [&](std::size_t k) {
      const std::size_t j = k / w;
      const std::size_t i = k % w;
      try {
        Rng rng(child_key(t, j, i));
        BeamNode& node = children[k];
        node.state = std::move(model_.reverse_children(beams[j].state, t, std::span<Rng>(&rng, 1)).front());
        node.t = t - 1;
        node.lineage = beams[j].lineage;
        node.parent = static_cast<int>(j);
        node.key = child_key(t, j, i);
        node.value = value_of(node.state, t - 1, rollout_key(t, j, i));
      } catch (const Error& e) {
        rethrow_with_context(e, t, j);
      }
    });
    counters_.denoiser_calls.fetch_add(static_cast<std::int64_t>(b * w));
    std::vector<BeamNode> selected;
    selected.reserve(b);
    for (std::size_t j = 0; j < b; ++j) {
      const std::span<const BeamNode> group(children.data() + j * w, w);
      selected.push_back(std::move(children[j * w + greedy_select(group)]));
    }
    return selected;
  }

  double value_of(const State& x, int t, const StreamKey& key) {
    return estimator_(x, t, counters_, key);
  }

  StreamKey child_key(int t, std::size_t beam, std::size_t child) const {
    return StreamKey{seed_, StreamPurpose::kChild, t, static_cast<std::int64_t>(beam),
                     static_cast<std::int64_t>(child), 0};
  }

  StreamKey rollout_key(int t, std::size_t beam, std::size_t child) const {
    return StreamKey{seed_, StreamPurpose::kRollout, t, static_cast<std::int64_t>(beam),
                     static_cast<std::int64_t>(child), 0};
  }

  Rng resample_rng(int t) const {
    return Rng(StreamKey{seed_, StreamPurpose::kResample, t, 0, 0, 0});
  }

  void record(const StepRecord& step, const std::vector<Beam>& beams) {
    StepRecord r = step;
    std::set<int> lineages;
    for (const auto& b : beams) lineages.insert(b.lineage);
    r.unique_lineages = static_cast<int>(lineages.size());
    report_.steps.push_back(r);
    for (std::size_t j = 0; j < beams.size(); ++j) {
      report_.lineage.push_back(
          LineageRecord{step.t - 1, static_cast<int>(j), beams[j].lineage, beams[j].parent});
    }
  }

  void record_values(int t, std::vector<double> values) {
    if (plan_.record_values) report_.values.push_back(ValueTrace{t, std::move(values)});
  }

  RunReport finish(const std::vector<Beam>& beams, int child_budget) {
    CallCounters scratch;
    std::vector<double> rewards(beams.size());
    for (std::size_t j = 0; j < beams.size(); ++j) {
      rewards[j] = evaluate_reward(reward_, beams[j].state, scratch,
                                   "final sample " + std::to_string(j) + ": ");
    }
    counters_.final_reward_calls.fetch_add(scratch.reward_calls.load());
    std::vector<std::size_t> order(beams.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rewards[a] > rewards[b]; });
    const auto keep = std::min(order.size(), static_cast<std::size_t>(plan_.outputs()));
    for (std::size_t k = 0; k < keep; ++k) {
      const std::size_t j = order[k];
      report_.finals.push_back(FinalSample{beams[j].state, rewards[j], beams[j].lineage, static_cast<int>(j)});
    }
    auto& L = report_.ledger;
    L = BudgetLedger::snapshot(counters_);
    L.child_budget = child_budget;
    L.steps = steps_;
    L.search_steps = report_.search_set.size();
    L.c_bar_formula = effective_budget(L.search_steps, child_budget, steps_);
    L.c_bar_realized = static_cast<double>(L.denoiser_calls) / steps_;
    L.outputs = plan_.outputs();
    L.c_bar_per_output = L.c_bar_realized / L.outputs;
    return std::move(report_);
  }

  const SearchPlan& plan() const { return plan_; }

 private:
  SearchPlan plan_;
  const DenoiserModel& model_;
  const RewardOracle& reward_;
  ValueEstimator estimator_;
  std::uint64_t seed_;
  int steps_;
  CallCounters counters_;
  RunReport report_;
};

std::vector<Beam> to_beams(std::vector<BeamNode>&& nodes) {
  std::vector<Beam> beams;
  beams.reserve(nodes.size());
  for (auto& n : nodes) beams.push_back(Beam{std::move(n.state), n.lineage, n.parent});
  return beams;
}

void require_algorithm(const SearchPlan& plan, Algorithm expected) {
  if (plan.algorithm != expected) {
    fail(ErrorKind::kInvalidConfiguration,
         "plan.algorithm is '" + std::string(to_string(plan.algorithm)) + "', expected '" +
             std::string(to_string(expected)) + "'",
         "plan.algorithm");
  }
}

}  // namespace

RunReport run_dsearch(const SearchPlan& plan, const DenoiserModel& model,
                      const RewardOracle& reward, std::uint64_t seed) {
  require_algorithm(plan, Algorithm::kDSearch);
  Engine eng(plan, model, reward, seed);
  const int T = eng.steps();
  auto beams = eng.init_beams(plan.beams.initial);
  for (int t = T; t >= 1; --t) {
    const int b = static_cast<int>(beams.size());
    StepRecord step{t, T - t, b, 1, false, b, 0, 0};
    if (eng.search_set().contains(t)) {
      step.searched = true;
      step.width = tree_width(plan.child_budget, b);
      if (budget_underflow(plan.child_budget, b)) eng.counters().budget_underflows.fetch_add(1);
      auto selected = eng.expand_and_select(beams, t, step.width);
      step.next_beams = std::min(b, beam_width(plan.beams, T - t + 1, T));
      const auto keep = selection_top_b(selected, step.next_beams);
      std::vector<BeamNode> survivors;
      std::vector<double> values;
      for (std::size_t j : keep) {
        values.push_back(*selected[j].value);
        survivors.push_back(std::move(selected[j]));
      }
      eng.record_values(t - 1, std::move(values));
      beams = to_beams(std::move(survivors));
    } else {
      eng.advance(beams, t);
    }
    eng.record(step, beams);
  }
  return eng.finish(beams, plan.child_budget);
}

RunReport run_dsearch_r(const SearchPlan& plan, const DenoiserModel& model,
                        const RewardOracle& reward, std::uint64_t seed) {
  require_algorithm(plan, Algorithm::kDSearchR);
  Engine eng(plan, model, reward, seed);
  const int T = eng.steps();
  auto beams = eng.init_beams(plan.beams.initial);
  const int b = plan.beams.initial;
  const int w = tree_width(plan.child_budget, b);
  for (int t = T; t >= 1; --t) {
    StepRecord step{t, T - t, b, 1, false, b, 0, 0};
    if (eng.search_set().contains(t)) {
      step.searched = true;
      step.width = w;
      if (budget_underflow(plan.child_budget, b)) eng.counters().budget_underflows.fetch_add(1);
      auto selected = eng.expand_and_select(beams, t, w);
      std::vector<double> values;
      for (const auto& n : selected) values.push_back(*n.value);
      const auto decision = plan_replacements(values, plan.resample_rate, plan.literal_quantile);
      auto next = to_beams(std::move(selected));
      Rng rng = eng.resample_rng(t);
      for (std::size_t pos : decision.dropped) {
        const std::size_t src = decision.retained[rng.categorical(decision.weights)];
        next[pos] = next[src];
        values[pos] = values[src];
      }
      step.replacements = static_cast<int>(decision.dropped.size());
      eng.record_values(t - 1, std::move(values));
      beams = std::move(next);
    } else {
      eng.advance(beams, t);
    }
    eng.record(step, beams);
  }
  return eng.finish(beams, plan.child_budget);
}

RunReport run_svdd(const SearchPlan& plan, const DenoiserModel& model,
                   const RewardOracle& reward, std::uint64_t seed) {
  require_algorithm(plan, Algorithm::kSvdd);
  Engine eng(plan, model, reward, seed);
  const int T = eng.steps();
  auto beams = eng.init_beams(plan.beams.initial);
  const int b = plan.beams.initial;
  for (int t = T; t >= 1; --t) {
    StepRecord step{t, T - t, b, plan.duplication, true, b, 0, 0};
    auto selected = eng.expand_and_select(beams, t, plan.duplication);
    std::vector<double> values;
    for (const auto& n : selected) values.push_back(*n.value);
    eng.record_values(t - 1, std::move(values));
    beams = to_beams(std::move(selected));
    eng.record(step, beams);
  }
  return eng.finish(beams, b * plan.duplication);
}

RunReport run_smc(const SearchPlan& plan, const DenoiserModel& model,
                  const RewardOracle& reward, std::uint64_t seed) {
  require_algorithm(plan, Algorithm::kSmc);
  Engine eng(plan, model, reward, seed);
  const int T = eng.steps();
  auto beams = eng.init_beams(plan.beams.initial);
  const auto b = beams.size();
  const double alpha = plan.estimator.alpha;
  for (int t = T; t >= 1; --t) {
    StepRecord step{t, T - t, static_cast<int>(b), 1, false, static_cast<int>(b), 0, 0};
    eng.advance(beams, t);
    if (eng.search_set().contains(t)) {
      step.searched = true;
      std::vector<double> values(b);
      parallel_for(b, plan.workers, [&](std::size_t j) {
        try {
          values[j] = eng.value_of(beams[j].state, t - 1, eng.rollout_key(t, j, 0));
        } catch (const Error& e) {
          rethrow_with_context(e, t, j);
        }
      });
      // exp(v / alpha), shifted by the max so the largest weight is 1.
      const double vmax = *std::max_element(values.begin(), values.end());
      std::vector<double> weights(b);
      for (std::size_t j = 0; j < b; ++j) weights[j] = std::exp((values[j] - vmax) / alpha);
      Rng rng = eng.resample_rng(t);
      std::vector<std::size_t> picks(b);
      if (plan.smc_resampling == ResamplingScheme::kMultinomial) {
        for (auto& p : picks) p = rng.categorical(weights);
      } else {
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        const double u0 = rng.uniform() / static_cast<double>(b);
        double acc = weights[0] / total;
        std::size_t i = 0;
        for (std::size_t k = 0; k < b; ++k) {
          const double u = u0 + static_cast<double>(k) / static_cast<double>(b);
          while (u > acc && i + 1 < b) acc += weights[++i] / total;
          picks[k] = i;
        }
      }
      std::vector<Beam> next(b);
      std::vector<double> kept(b);
      for (std::size_t j = 0; j < b; ++j) {
        next[j] = beams[picks[j]];
        kept[j] = values[picks[j]];
      }
      eng.record_values(t - 1, std::move(kept));
      beams = std::move(next);
    }
    eng.record(step, beams);
  }
  return eng.finish(beams, static_cast<int>(b));
}

namespace {

RunReport run_independent(const SearchPlan& plan, const DenoiserModel& model,
                          const RewardOracle& reward, std::uint64_t seed) {
  Engine eng(plan, model, reward, seed);
  const int T = eng.steps();
  auto beams = eng.init_beams(plan.initial_beams());
  const int b = static_cast<int>(beams.size());
  for (int t = T; t >= 1; --t) {
    eng.advance(beams, t);
    eng.record(StepRecord{t, T - t, b, 1, false, b, 0, 0}, beams);
  }
  return eng.finish(beams, b);
}

}  // namespace

RunReport run_best_of_n(const SearchPlan& plan, const DenoiserModel& model,
                        const RewardOracle& reward, std::uint64_t seed) {
  require_algorithm(plan, Algorithm::kBestOfN);
  return run_independent(plan, model, reward, seed);
}

RunReport run_unguided(const SearchPlan& plan, const DenoiserModel& model,
                       const RewardOracle& reward, std::uint64_t seed) {
  require_algorithm(plan, Algorithm::kNone);
  return run_independent(plan, model, reward, seed);
}

RunReport run_search(const SearchPlan& plan, const DenoiserModel& model,
                     const RewardOracle& reward, std::uint64_t seed) {
  switch (plan.algorithm) {
    case Algorithm::kDSearch: return run_dsearch(plan, model, reward, seed);
    case Algorithm::kDSearchR: return run_dsearch_r(plan, model, reward, seed);
    case Algorithm::kSvdd: return run_svdd(plan, model, reward, seed);
    case Algorithm::kSmc: return run_smc(plan, model, reward, seed);
    case Algorithm::kBestOfN: return run_best_of_n(plan, model, reward, seed);
    case Algorithm::kNone: return run_unguided(plan, model, reward, seed);
  }
  fail(ErrorKind::kInvalidConfiguration, "unknown algorithm");
}

}  // namespace dsearch
