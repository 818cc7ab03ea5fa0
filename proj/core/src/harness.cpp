#include "dsearch/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dsearch/error.hpp"
#include "dsearch/parallel.hpp"
#include "dsearch/value.hpp"

namespace dsearch {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json state_json(const State& s) {
  if (const auto* seq = std::get_if<TokenSeq>(&s)) return seq->tokens;
  return std::get<ContinuousVec>(s).values;
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json metrics_json(const MetricReport& m) {
  return {{"median_reward", m.reward.median},
          {"mean_reward", m.reward.mean},
          {"stddev_reward", m.reward.stddev},
          {"diversity", m.diversity},
          {"lineage_diversity", m.lineage_diversity},
          {"nll_mean", finite_or_string(m.nll.mean)},
          {"nll_zero_probability", m.nll.zero_probability},
          {"nll_count", m.nll.count}};
}

json ledger_json(const BudgetLedger& l) {
  return {{"child_budget", l.child_budget},
          {"steps", l.steps},
          {"search_steps", l.search_steps},
          {"denoiser_calls", l.denoiser_calls},
          {"lookahead_calls", l.lookahead_calls},
          {"x0_calls", l.x0_calls},
          {"reward_calls", l.reward_calls},
          {"final_reward_calls", l.final_reward_calls},
          {"budget_underflows", l.budget_underflows},
          {"c_bar_formula", l.c_bar_formula},
          {"c_bar_realized", l.c_bar_realized},
          {"outputs", l.outputs},
          {"c_bar_per_output", l.c_bar_per_output}};
}

json schedule_json(std::span<const StepRecord> steps) {
  json out = json::array();
  for (const auto& s : steps) {
    out.push_back({{"s", s.s},
                   {"t", s.t},
                   {"beams", s.beams},
                   {"width", s.width},
                   {"searched", s.searched},
                   {"next_beams", s.next_beams},
                   {"replacements", s.replacements},
                   {"unique_lineages", s.unique_lineages}});
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string(), "out");
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string(), "out");
}

fs::path prepare_dir(const RunConfig& config, const CommandOptions& options) {
  auto dir = resolve_output_dir(config, options);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create output directory " + dir.string() + ": " + ec.message(), "out");
  return dir;
}

// Fixed-precision number formatting for CSV tables.
std::string num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

struct Task {
  SearchPlan plan;
  std::uint64_t seed = 0;
};

// Runs tasks with up to `jobs` concurrent runs. A single task gets the jobs
// as engine workers instead; the engine's output does not depend on either.
std::vector<RunReport> run_tasks(std::vector<Task> tasks, const DenoiserModel& model,
                                 const RewardOracle& reward, int jobs) {
  jobs = effective_workers(jobs);
  const int inner = tasks.size() == 1 ? jobs : 1;
  for (auto& t : tasks) t.plan.workers = inner;
  std::vector<RunReport> reports(tasks.size());
  parallel_for(tasks.size(), tasks.size() == 1 ? 1 : jobs, [&](std::size_t i) {
    reports[i] = run_search(tasks[i].plan, model, reward, tasks[i].seed);
  });
  return reports;
}

}  // namespace

std::vector<std::uint64_t> resolve_seeds(const RunConfig& config, const CommandOptions& options) {
  if (options.seed) return {*options.seed};
  return config.seeds;
}

fs::path resolve_output_dir(const RunConfig& config, const CommandOptions& options) {
  return options.out ? fs::path(*options.out) : fs::path(config.output_dir);
}

MetricReport summarize(const RunReport& report, const DenoiserModel& model) {
  MetricReport m;
  const auto rewards = report.rewards();
  const auto states = report.states();
  const auto lineages = report.lineages();
  m.reward = reward_stats(rewards);
  m.diversity = diversity(states);
  m.lineage_diversity = lineage_diversity(lineages);
  m.nll = nll_report(states, model);
  return m;
}

int solve_child_budget(SearchPlan plan, int steps, double target_calls, std::uint64_t seed) {
  const int lo = std::max(1, plan.beams.initial);
  const int hi = lo + static_cast<int>(std::ceil(target_calls)) + 1;
  int best = lo;
  double best_gap = INFINITY;
  for (int c = lo; c <= hi; ++c) {
    plan.child_budget = c;
    const auto calls = static_cast<double>(predicted_denoiser_calls(predict_schedule(plan, steps, seed)));
    const double gap = std::abs(calls - target_calls);
    if (gap < best_gap) {
      best_gap = gap;
      best = c;
    }
    if (calls > target_calls) break;
  }
  return best;
}

SearchPlan matched_plan(const SearchPlan& base, Algorithm algorithm, double c_bar, int steps,
                        std::uint64_t seed) {
  if (!(c_bar >= 1.0)) fail(ErrorKind::kInvalidConfiguration, "c_bar must be >= 1", "c_bar");
  SearchPlan p = base;
  p.algorithm = algorithm;
  const int out = base.beams.final;
  const int n = std::max(1, static_cast<int>(std::lround(c_bar)));
  const BeamSchedule fixed{BeamKind::kNone, out, out, base.beams.kappa};
  const int cap = std::max(out, static_cast<int>(std::floor(c_bar)) * out);
  const double target = c_bar * out * steps;
  switch (algorithm) {
    case Algorithm::kNone:
      p.beams = fixed;
      break;
    case Algorithm::kBestOfN:
      p.beams = fixed;
      p.best_of_n = n;
      break;
    case Algorithm::kSvdd:
      p.beams = fixed;
      p.duplication = n;
      break;
    case Algorithm::kSmc:
      p.beams = BeamSchedule{BeamKind::kNone, n * out, out, base.beams.kappa};
      break;
    case Algorithm::kDSearch:
      p.beams.initial = std::clamp(base.beams.initial, out, cap);
      p.child_budget = solve_child_budget(p, steps, target, seed);
      break;
    case Algorithm::kDSearchR:
      p.beams = BeamSchedule{BeamKind::kNone, std::clamp(base.beams.initial, out, cap), out, base.beams.kappa};
      p.child_budget = solve_child_budget(p, steps, target, seed);
      break;
  }
  p.validate();
  return p;
}

std::string result_records(const RunReport& report, const DenoiserModel& model) {
  std::string out;
  for (std::size_t i = 0; i < report.finals.size(); ++i) {
    const auto& f = report.finals[i];
    json rec;
    rec["schema_version"] = kResultSchemaVersion;
    rec["seed"] = report.seed;
    rec["rank"] = i;
    rec["reward"] = finite_or_string(f.reward);
    const auto nll = model.exact_nll(f.state);
    rec["nll"] = nll ? finite_or_string(*nll) : json(nullptr);
    rec["lineage"] = f.lineage;
    rec["state"] = state_json(f.state);
    out += rec.dump() + "\n";
  }
  return out;
}

std::string schedule_table_csv(std::span<const StepRecord> steps) {
  std::string out = "s,t,beams,width,searched,next_beams,calls\n";
  for (const auto& s : steps) {
    const int calls = s.searched ? s.beams * s.width : s.beams;
    out += std::to_string(s.s) + "," + std::to_string(s.t) + "," + std::to_string(s.beams) + "," +
           std::to_string(s.width) + "," + (s.searched ? "1" : "0") + "," + std::to_string(s.next_beams) +
           "," + std::to_string(calls) + "\n";
  }
  return out;
}

RunOutputs cmd_run(const RunConfig& config, const CommandOptions& options) {
  const auto model = build_model(config.model);
  const auto reward = build_reward(config);
  const auto seeds = resolve_seeds(config, options);
  const bool trace = options.trace || config.trace;
  SearchPlan plan = config.plan;
  plan.record_values = plan.record_values || trace;
  plan.validate();

  std::vector<Task> tasks;
  for (auto s : seeds) tasks.push_back({plan, s});
  RunOutputs out;
  out.reports = run_tasks(std::move(tasks), *model, *reward, options.jobs);

  const auto dir = prepare_dir(config, options);
  json summary;
  summary["schema_version"] = kResultSchemaVersion;
  summary["name"] = config.name;
  summary["algorithm"] = to_string(plan.algorithm);
  summary["model"] = model->name();
  summary["reward"] = reward->name();
  summary["runs"] = json::array();
  for (const auto& r : out.reports) {
    const auto file = dir / ("run_seed" + std::to_string(r.seed) + ".jsonl");
    write_file(file, result_records(r, *model));
    out.result_files.push_back(file);
    json run;
    run["seed"] = r.seed;
    run["result_file"] = file.filename().string();
    run["metrics"] = metrics_json(summarize(r, *model));
    run["ledger"] = ledger_json(r.ledger);
    run["search_set"] = r.search_set.times();
    run["schedule"] = schedule_json(r.steps);
    summary["runs"].push_back(std::move(run));

    if (trace) {
      std::string lines;
      for (const auto& l : r.lineage) {
        lines += json{{"schema_version", kResultSchemaVersion}, {"record", "lineage"}, {"t", l.t},
                      {"beam", l.beam}, {"lineage", l.lineage}, {"parent", l.parent}}
                     .dump() +
                 "\n";
      }
      for (const auto& v : r.values) {
        json vals = json::array();
        for (double x : v.values) vals.push_back(finite_or_string(x));
        lines += json{{"schema_version", kResultSchemaVersion}, {"record", "values"}, {"t", v.t},
                      {"values", vals}}
                     .dump() +
                 "\n";
      }
      const auto tf = dir / ("trace_seed" + std::to_string(r.seed) + ".jsonl");
      write_file(tf, lines);
      out.trace_files.push_back(tf);
    }
  }
  out.summary_file = dir / "summary.json";
  write_file(out.summary_file, summary.dump(2) + "\n");
  return out;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "C_bar" || name == "c_bar") return SweepAxis::kCBar;
  if (name == "K") return SweepAxis::kK;
  if (name == "M") return SweepAxis::kM;
  if (name == "schedule-kind") return SweepAxis::kScheduleKind;
  if (name == "r_r") return SweepAxis::kResampleRate;
  fail(ErrorKind::kInvalidConfiguration, "unknown sweep axis '" + std::string(name) + "'", "axis");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kCBar: return "C_bar";
    case SweepAxis::kK: return "K";
    case SweepAxis::kM: return "M";
    case SweepAxis::kScheduleKind: return "schedule-kind";
    case SweepAxis::kResampleRate: return "r_r";
  }
  return "C_bar";
}

namespace {

double parse_number(const std::string& v, const char* field) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorKind::kInvalidConfiguration, "not a number: '" + v + "'", field);
  }
}

int parse_int(const std::string& v, const char* field) {
  const double x = parse_number(v, field);
  if (x != std::floor(x)) fail(ErrorKind::kInvalidConfiguration, "not an integer: '" + v + "'", field);
  return static_cast<int>(x);
}

SearchPlan sweep_plan(const RunConfig& config, SweepAxis axis, const std::string& value, std::uint64_t seed) {
  const auto& base = config.plan;
  SearchPlan p = base;
  switch (axis) {
    case SweepAxis::kCBar:
      return matched_plan(base, base.algorithm, parse_number(value, "values"), config.model.steps, seed);
    case SweepAxis::kK: {
      const int k = parse_int(value, "values");
      if (base.algorithm == Algorithm::kBestOfN || base.algorithm == Algorithm::kNone) {
        fail(ErrorKind::kInvalidConfiguration, "K sweep needs a value-guided algorithm", "axis");
      }
      p.estimator.mode = k == 0 ? ValueMode::kOneStep : ValueMode::kLookahead;
      p.estimator.lookahead_steps = k;
      break;
    }
    case SweepAxis::kM:
      if (base.estimator.mode != ValueMode::kLookahead) {
        fail(ErrorKind::kInvalidConfiguration, "M sweep needs estimator.mode=lookahead", "axis");
      }
      p.estimator.duplicates = parse_int(value, "values");
      break;
    case SweepAxis::kScheduleKind:
      if (base.algorithm != Algorithm::kDSearch) {
        fail(ErrorKind::kInvalidConfiguration, "schedule-kind sweep applies to dsearch only", "axis");
      }
      p.beams.kind = parse_beam_kind(value);
      break;
    case SweepAxis::kResampleRate:
      if (base.algorithm != Algorithm::kDSearchR) {
        fail(ErrorKind::kInvalidConfiguration, "r_r sweep applies to dsearch-r only", "axis");
      }
      p.resample_rate = parse_number(value, "values");
      break;
  }
  p.validate();
  return p;
}

}  // namespace

std::string SweepResult::csv() const {
  std::string out = std::string(to_string(axis)) +
                    ",seed,median_reward,mean_reward,diversity,nll,c_bar,denoiser_calls\n";
  for (const auto& r : rows) {
    out += r.value + "," + std::to_string(r.seed) + "," + num(r.median_reward) + "," + num(r.mean_reward) +
           "," + num(r.diversity) + "," + num(r.nll) + "," + num(r.c_bar) + "," +
           std::to_string(r.denoiser_calls) + "\n";
  }
  return out;
}

SweepResult cmd_sweep(const RunConfig& config, SweepAxis axis, const std::vector<std::string>& values,
                      const CommandOptions& options) {
  if (values.empty()) fail(ErrorKind::kInvalidConfiguration, "sweep needs at least one value", "values");
  const auto model = build_model(config.model);
  const auto reward = build_reward(config);
  const auto seeds = resolve_seeds(config, options);
  std::vector<Task> tasks;
  for (const auto& v : values) {
    for (auto s : seeds) tasks.push_back({sweep_plan(config, axis, v, s), s});
  }
  const auto reports = run_tasks(std::move(tasks), *model, *reward, options.jobs);
  SweepResult result;
  result.axis = axis;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const auto m = summarize(r, *model);
    result.rows.push_back(SweepRow{values[i / seeds.size()], r.seed, m.reward.median, m.reward.mean,
                                   m.diversity, m.nll.mean, r.ledger.c_bar_per_output,
                                   r.ledger.denoiser_calls});
  }
  write_file(prepare_dir(config, options) / "sweep.csv", result.csv());
  return result;
}

std::string CompareResult::csv() const {
  std::string out =
      "method,seed,median_reward,mean_reward,diversity,lineage_diversity,nll,denoiser_calls,c_bar\n";
  for (const auto& r : rows) {
    out += r.method + "," + std::to_string(r.seed) + "," + num(r.metrics.reward.median) + "," +
           num(r.metrics.reward.mean) + "," + num(r.metrics.diversity) + "," +
           num(r.metrics.lineage_diversity) + "," + num(r.metrics.nll.mean) + "," +
           std::to_string(r.ledger.denoiser_calls) + "," + num(r.ledger.c_bar_per_output) + "\n";
  }
  return out;
}

CompareResult cmd_compare(const RunConfig& config, const std::vector<Algorithm>& algorithms,
                          std::optional<double> c_bar, const CommandOptions& options,
                          bool include_pretrained) {
  std::vector<Algorithm> methods = algorithms;
  if (include_pretrained && std::find(methods.begin(), methods.end(), Algorithm::kNone) == methods.end()) {
    methods.push_back(Algorithm::kNone);
  }
  if (methods.size() < 2) fail(ErrorKind::kInvalidConfiguration, "compare needs >= 2 algorithms", "algorithms");
  CompareResult result;
  result.c_bar = c_bar ? *c_bar : config.c_bar.value_or(0.0);
  if (!(result.c_bar >= 1.0)) {
    fail(ErrorKind::kInvalidConfiguration, "compare needs c_bar >= 1 (config or flag)", "c_bar");
  }
  const auto model = build_model(config.model);
  const auto reward = build_reward(config);
  const auto seeds = resolve_seeds(config, options);
  std::vector<Task> tasks;
  for (auto s : seeds) {
    for (auto a : methods) tasks.push_back({matched_plan(config.plan, a, result.c_bar, config.model.steps, s), s});
  }
  const auto reports = run_tasks(std::move(tasks), *model, *reward, options.jobs);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto a = methods[i % methods.size()];
    result.rows.push_back(CompareRow{a == Algorithm::kNone ? "pretrained" : std::string(to_string(a)),
                                     reports[i].seed, summarize(reports[i], *model), reports[i].ledger});
  }
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::int64_t lo = INT64_MAX, hi = 0;
    for (std::size_t k = 0; k < methods.size(); ++k) {
      if (methods[k] == Algorithm::kNone) continue;
      const auto calls = result.rows[s * methods.size() + k].ledger.denoiser_calls;
      lo = std::min(lo, calls);
      hi = std::max(hi, calls);
    }
    if (hi > 0) result.max_call_ratio = std::max(result.max_call_ratio, double(hi) / double(lo));
  }
  write_file(prepare_dir(config, options) / "compare.csv", result.csv());
  return result;
}

std::string DiagnoseResult::csv() const {
  std::string out = "t,pearson,n\n";
  for (const auto& r : rows) {
    out += std::to_string(r.t) + "," + (r.pearson ? num(*r.pearson) : std::string("undefined")) + "," +
           std::to_string(r.n) + "\n";
  }
  return out;
}

DiagnoseResult cmd_diagnose(const RunConfig& config, std::vector<int> checkpoints,
                            const CommandOptions& options, DiagnoseEstimator estimator) {
  if (checkpoints.empty()) checkpoints = config.checkpoints;
  if (checkpoints.empty()) {
    fail(ErrorKind::kInvalidConfiguration, "diagnose needs checkpoints", "checkpoints");
  }
  const auto model = build_model(config.model);
  const auto reward = build_reward(config);
  const auto seed = resolve_seeds(config, options).front();
  const int workers = effective_workers(options.jobs);
  for (int t : checkpoints) {
    if (t < 1 || t > model->steps()) {
      fail(ErrorKind::kInvalidConfiguration, "checkpoint outside [1, T]", "checkpoints");
    }
  }
  CheckpointValueFn fn;
  std::vector<double> finals;
  ValueEstimator value(config.plan.estimator, *model, *reward);
  if (estimator == DiagnoseEstimator::kPerfect) {
    finals = simulate_checkpoints(*model, *reward, {}, config.trajectories, seed, workers).final_rewards;
    fn = [&](const State&, int, std::size_t j) { return finals[j]; };
  } else {
    fn = [&](const State& x, int t, std::size_t j) {
      CallCounters counters;
      const StreamKey key{seed, StreamPurpose::kRollout, t, static_cast<std::int64_t>(j), 0, 0};
      return value(x, t, counters, key);
    };
  }
  DiagnoseResult result;
  result.rows =
      value_correlation_diagnostic(*model, fn, *reward, checkpoints, config.trajectories, seed, workers);
  write_file(prepare_dir(config, options) / "diagnose.csv", result.csv());
  return result;
}

std::string cmd_schedule_table(const RunConfig& config, const CommandOptions& options) {
  const auto seed = resolve_seeds(config, options).front();
  const auto steps = predict_schedule(config.plan, config.model.steps, seed);
  return schedule_table_csv(steps);
}

std::string error_record(const std::exception& error) {
  json e;
  e["schema_version"] = kResultSchemaVersion;
  if (const auto* de = dynamic_cast<const Error*>(&error)) {
    e["error"] = {{"kind", to_string(de->kind())}, {"field", de->field()}, {"message", de->what()}};
  } else {
    e["error"] = {{"kind", "internal"}, {"field", ""}, {"message", error.what()}};
  }
  return e.dump();
}

}  // namespace dsearch
