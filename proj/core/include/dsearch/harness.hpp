#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsearch/config.hpp"
#include "dsearch/metrics.hpp"
#include "dsearch/search.hpp"

namespace dsearch {

inline constexpr int kResultSchemaVersion = 1;

struct CommandOptions {
  std::optional<std::uint64_t> seed;  // overrides config.seeds with one seed
  std::optional<std::string> out;     // overrides config.output_dir
  int jobs = 1;
  bool trace = false;  // ORed with config.trace
};

std::vector<std::uint64_t> resolve_seeds(const RunConfig& config, const CommandOptions& options);
std::filesystem::path resolve_output_dir(const RunConfig& config, const CommandOptions& options);

MetricReport summarize(const RunReport& report, const DenoiserModel& model);

// Plan for `algorithm` at per-output budget c_bar, keeping the base plan's
// B_final, estimator and search-set settings:
//   none        B_final unguided trajectories
//   best-of-n   N = round(c_bar)
//   svdd        duplication = round(c_bar), b = B_final
//   smc         round(c_bar) * B_final particles
//   dsearch     C chosen so the predicted denoiser calls are closest to
//               c_bar * B_final * T (B_init capped at floor(c_bar) * B_final)
//   dsearch-r   as dsearch with a fixed beam count
SearchPlan matched_plan(const SearchPlan& base, Algorithm algorithm, double c_bar, int steps,
                        std::uint64_t seed);

// Smallest C in [lo, hi] whose predicted call count is closest to target.
int solve_child_budget(SearchPlan plan, int steps, double target_calls, std::uint64_t seed);

// One JSON line per final sample, best first.
std::string result_records(const RunReport& report, const DenoiserModel& model);
std::string schedule_table_csv(std::span<const StepRecord> steps);

struct RunOutputs {
  std::vector<std::filesystem::path> result_files;
  std::filesystem::path summary_file;
  std::vector<std::filesystem::path> trace_files;
  std::vector<RunReport> reports;
};

// Writes run_seed<k>.jsonl per seed and summary.json.
RunOutputs cmd_run(const RunConfig& config, const CommandOptions& options);

enum class SweepAxis { kCBar, kK, kM, kScheduleKind, kResampleRate };
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

struct SweepRow {
  std::string value;
  std::uint64_t seed = 0;
  double median_reward = 0.0;
  double mean_reward = 0.0;
  double diversity = 0.0;
  double nll = 0.0;
  double c_bar = 0.0;  // realized per-output
  std::int64_t denoiser_calls = 0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kCBar;
  std::vector<SweepRow> rows;  // value-major, then seed
  std::string csv() const;
};

// Writes sweep.csv.
SweepResult cmd_sweep(const RunConfig& config, SweepAxis axis, const std::vector<std::string>& values,
                      const CommandOptions& options);

struct CompareRow {
  std::string method;
  std::uint64_t seed = 0;
  MetricReport metrics;
  BudgetLedger ledger;
};

struct CompareResult {
  double c_bar = 0.0;
  std::vector<CompareRow> rows;  // seed-major, then method
  // Largest max/min ratio of denoiser calls across guided methods of one seed.
  double max_call_ratio = 1.0;
  bool budgets_matched() const { return max_call_ratio <= 1.05; }
  std::string csv() const;
};

// Writes compare.csv. The unguided row "pretrained" is appended unless
// already requested or include_pretrained is false.
CompareResult cmd_compare(const RunConfig& config, const std::vector<Algorithm>& algorithms,
                          std::optional<double> c_bar, const CommandOptions& options,
                          bool include_pretrained = true);

enum class DiagnoseEstimator { kPlan, kPerfect };

struct DiagnoseResult {
  std::vector<CheckpointCorrelation> rows;
  std::string csv() const;
};

// Writes diagnose.csv. kPlan uses the config's value estimator; kPerfect
// returns each trajectory's realized final reward.
DiagnoseResult cmd_diagnose(const RunConfig& config, std::vector<int> checkpoints,
                            const CommandOptions& options,
                            DiagnoseEstimator estimator = DiagnoseEstimator::kPlan);

// Predicted schedule for the first resolved seed.
std::string cmd_schedule_table(const RunConfig& config, const CommandOptions& options);

// Machine-readable error record for the CLI.
std::string error_record(const std::exception& error);

}  // namespace dsearch
