#include "dsearch/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "dsearch/error.hpp"

namespace dsearch {

BeamKind parse_beam_kind(std::string_view name) {
  if (name == "none") return BeamKind::kNone;
  if (name == "linear") return BeamKind::kLinear;
  if (name == "exponential") return BeamKind::kExponential;
  if (name == "quadratic") return BeamKind::kQuadratic;
  if (name == "sigmoid") return BeamKind::kSigmoid;
  fail(ErrorKind::kInvalidConfiguration, "unknown beam schedule '" + std::string(name) + "'",
       "beam.kind");
}

std::string_view to_string(BeamKind kind) {
  switch (kind) {
    case BeamKind::kNone: return "none";
    case BeamKind::kLinear: return "linear";
    case BeamKind::kExponential: return "exponential";
    case BeamKind::kQuadratic: return "quadratic";
    case BeamKind::kSigmoid: return "sigmoid";
  }
  return "none";
}

void BeamSchedule::validate() const {
  if (final < 1) fail(ErrorKind::kInvalidConfiguration, "final beam count must be >= 1", "beam.final");
  if (final > initial) {
    fail(ErrorKind::kInvalidConfiguration, "beam schedule needs initial >= final", "beam.final");
  }
  if (kind == BeamKind::kSigmoid && !(kappa > 0.0)) {
    fail(ErrorKind::kInvalidConfiguration, "sigmoid steepness must be > 0", "beam.kappa");
  }
}

int beam_width(const BeamSchedule& schedule, int s, int steps) {
  schedule.validate();
  if (steps < 1) fail(ErrorKind::kInvalidConfiguration, "steps must be >= 1");
  if (s < 0 || s > steps) fail(ErrorKind::kInvalidInput, "beam_width: s outside [0, T]");
  const double hi = schedule.initial;
  const double lo = schedule.final;
  const double u = static_cast<double>(s) / steps;
  double value = hi;
  switch (schedule.kind) {
    case BeamKind::kNone:
      return schedule.initial;
    case BeamKind::kLinear:
      value = hi - u * (hi - lo);
      break;
    case BeamKind::kExponential:
      value = hi * std::pow(lo / hi, u);
      break;
    case BeamKind::kQuadratic:
      value = lo + (hi - lo) * (1.0 - u) * (1.0 - u);
      break;
    case BeamKind::kSigmoid: {
      // Decreasing logistic centred at T/2, rescaled to hit both endpoints.
      auto g = [&](double x) { return 1.0 / (1.0 + std::exp(schedule.kappa * (x - steps / 2.0))); };
      const double g0 = g(0.0);
      const double gT = g(static_cast<double>(steps));
      value = lo + (hi - lo) * (g(static_cast<double>(s)) - gT) / (g0 - gT);
      break;
    }
  }
  const auto rounded = static_cast<int>(std::lround(value));
  return std::clamp(rounded, schedule.final, schedule.initial);
}

int tree_width(int child_budget, int beams) {
  if (beams < 1) fail(ErrorKind::kInvalidConfiguration, "beam count must be >= 1");
  return std::max(1, child_budget / beams);
}

bool budget_underflow(int child_budget, int beams) { return child_budget < beams; }

SearchSetKind parse_search_set_kind(std::string_view name) {
  if (name == "all") return SearchSetKind::kAll;
  if (name == "uniform") return SearchSetKind::kUniform;
  if (name == "linear") return SearchSetKind::kLinear;
  if (name == "exponential") return SearchSetKind::kExponential;
  if (name == "step") return SearchSetKind::kStep;
  if (name == "quadratic") return SearchSetKind::kQuadratic;
  if (name == "sigmoid") return SearchSetKind::kSigmoid;
  fail(ErrorKind::kInvalidConfiguration, "unknown search-set kind '" + std::string(name) + "'",
       "search_set.kind");
}

std::string_view to_string(SearchSetKind kind) {
  switch (kind) {
    case SearchSetKind::kAll: return "all";
    case SearchSetKind::kUniform: return "uniform";
    case SearchSetKind::kLinear: return "linear";
    case SearchSetKind::kExponential: return "exponential";
    case SearchSetKind::kStep: return "step";
    case SearchSetKind::kQuadratic: return "quadratic";
    case SearchSetKind::kSigmoid: return "sigmoid";
  }
  return "all";
}

SearchSetMode parse_search_set_mode(std::string_view name) {
  if (name == "stochastic") return SearchSetMode::kStochastic;
  if (name == "systematic") return SearchSetMode::kSystematic;
  fail(ErrorKind::kInvalidConfiguration, "unknown search-set mode '" + std::string(name) + "'",
       "search_set.mode");
}

std::string_view to_string(SearchSetMode mode) {
  return mode == SearchSetMode::kStochastic ? "stochastic" : "systematic";
}

void SearchSetSpec::validate() const {
  if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) {
    fail(ErrorKind::kInvalidConfiguration, "budget_fraction must lie in (0, 1]",
         "search_set.budget_fraction");
  }
  if (kind == SearchSetKind::kSigmoid && !(delta > 0.0)) {
    fail(ErrorKind::kInvalidConfiguration, "sigmoid delta must be > 0", "search_set.delta");
  }
  if (kind == SearchSetKind::kQuadratic && !(gamma > 0.0)) {
    fail(ErrorKind::kInvalidConfiguration, "quadratic gamma must be > 0", "search_set.gamma");
  }
  if (kind == SearchSetKind::kStep && step_levels < 1) {
    fail(ErrorKind::kInvalidConfiguration, "step_levels must be >= 1", "search_set.step_levels");
  }
}

SearchSet::SearchSet(std::vector<bool> members) : members_(std::move(members)) {
  count_ = static_cast<int>(std::count(members_.begin(), members_.end(), true));
}

SearchSet SearchSet::all(int steps) {
  return SearchSet(std::vector<bool>(static_cast<std::size_t>(steps), true));
}

bool SearchSet::contains(int t) const {
  if (t < 1 || t > steps()) return false;
  return members_[static_cast<std::size_t>(t - 1)];
}

std::vector<int> SearchSet::times() const {
  std::vector<int> out;
  for (int t = steps(); t >= 1; --t) {
    if (contains(t)) out.push_back(t);
  }
  return out;
}

double search_density(const SearchSetSpec& spec, int t, int steps) {
  // The step leaving time t produces the state at forward index T - t + 1.
  const double s_next = static_cast<double>(steps - t + 1);
  const double u = s_next / steps;
  switch (spec.kind) {
    case SearchSetKind::kAll:
    case SearchSetKind::kUniform:
      return 1.0;
    case SearchSetKind::kLinear:
      return u;
    case SearchSetKind::kExponential:
      return std::exp(spec.beta * u);
    case SearchSetKind::kStep:
      return std::pow(2.0, std::min<double>(spec.step_levels - 1,
                                            std::floor(u * spec.step_levels - 1e-12)));
    case SearchSetKind::kQuadratic:
      return spec.gamma * u * u;
    case SearchSetKind::kSigmoid:
      return 1.0 / (1.0 + std::exp(-spec.delta * (s_next - steps / 2.0)));
  }
  return 1.0;
}

namespace {

// min(1, lambda f) over t = 1..T with lambda chosen so the sum equals target.
std::vector<double> calibrate(const SearchSetSpec& spec, int steps, double target) {
  const auto n = static_cast<std::size_t>(steps);
  std::vector<double> f(n);
  for (int t = 1; t <= steps; ++t) f[static_cast<std::size_t>(t - 1)] = search_density(spec, t, steps);
  const auto positive = std::count_if(f.begin(), f.end(), [](double x) { return x > 0.0; });
  if (static_cast<double>(positive) < target - 1e-9) {
    std::ostringstream msg;
    msg << "search-set budget " << spec.budget_fraction << " unreachable; maximum achievable fraction is "
        << static_cast<double>(positive) / steps;
    fail(ErrorKind::kCalibration, msg.str(), "search_set.budget_fraction");
  }
  auto total = [&](double lambda) {
    double acc = 0.0;
    for (double x : f) acc += std::min(1.0, lambda * x);
    return acc;
  };
  const double fmin_pos = *std::min_element(f.begin(), f.end(), [](double a, double b) {
    if (a <= 0.0) return false;
    if (b <= 0.0) return true;
    return a < b;
  });
  double lo = 0.0;
  double hi = 1.0 / fmin_pos;  // every positive entry capped: total == positive
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < target ? lo : hi) = mid;
  }
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::min(1.0, hi * f[i]);
  return p;
}

}  // namespace

std::vector<double> inclusion_probabilities(const SearchSetSpec& spec, int steps) {
  spec.validate();
  if (steps < 1) fail(ErrorKind::kInvalidConfiguration, "steps must be >= 1");
  if (spec.kind == SearchSetKind::kAll) return std::vector<double>(static_cast<std::size_t>(steps), 1.0);
  return calibrate(spec, steps, spec.budget_fraction * steps);
}

SearchSet generate_search_set(const SearchSetSpec& spec, int steps, Rng& rng) {
  spec.validate();
  if (spec.kind == SearchSetKind::kAll) return SearchSet::all(steps);
  std::vector<bool> members(static_cast<std::size_t>(steps), false);

  if (spec.mode == SearchSetMode::kStochastic) {
    const auto p = inclusion_probabilities(spec, steps);
    for (int t = steps; t >= 1; --t) {
      members[static_cast<std::size_t>(t - 1)] = rng.uniform() <= p[static_cast<std::size_t>(t - 1)];
    }
    return SearchSet(std::move(members));
  }

  // Systematic: walk t = T..1 accumulating p and take the step in which the
  // running sum crosses k + 1/2. Each p <= 1, so every step is taken at most
  // once and exactly round(budget * T) steps are taken.
  const auto want = static_cast<int>(std::lround(spec.budget_fraction * steps));
  if (want == 0) return SearchSet(std::move(members));
  const auto p = calibrate(spec, steps, want);
  double acc = 0.0;
  int next = 0;
  for (int t = steps; t >= 1 && next < want; --t) {
    acc += p[static_cast<std::size_t>(t - 1)];
    if (acc + 1e-9 >= next + 0.5) {
      members[static_cast<std::size_t>(t - 1)] = true;
      ++next;
    }
  }
  // Rounding residue can leave the last crossing unclaimed; take the densest
  // remaining steps.
  for (int t = 1; next < want && t <= steps; ++t) {
    if (!members[static_cast<std::size_t>(t - 1)]) {
      members[static_cast<std::size_t>(t - 1)] = true;
      ++next;
    }
  }
  return SearchSet(std::move(members));
}

double effective_budget(int search_steps, int child_budget, int steps) {
  if (steps < 1 || search_steps < 0 || search_steps > steps) {
    fail(ErrorKind::kInvalidInput, "effective_budget needs 0 <= |A| <= T");
  }
  return (static_cast<double>(search_steps) * child_budget + steps - search_steps) / steps;
}

}  // namespace dsearch
