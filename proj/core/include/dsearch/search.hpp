#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dsearch/budget.hpp"
#include "dsearch/denoiser.hpp"
#include "dsearch/reward.hpp"
#include "dsearch/schedules.hpp"
#include "dsearch/state.hpp"
#include "dsearch/value.hpp"

namespace dsearch {

enum class Algorithm { kDSearch, kDSearchR, kSvdd, kSmc, kBestOfN, kNone };
enum class ResamplingScheme { kMultinomial, kSystematic };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algorithm);
ResamplingScheme parse_resampling(std::string_view name);
std::string_view to_string(ResamplingScheme scheme);

// Beam counts by algorithm:
//   dsearch    beams.initial, shrinking along `beams` at search steps
//   dsearch-r  beams.initial, fixed (kind must be none)
//   svdd, smc  beams.initial, fixed (kind must be none)
//   best-of-n  best_of_n * beams.final independent trajectories
//   none       beams.final independent trajectories
// Every algorithm returns beams.final samples ranked by true reward.
struct SearchPlan {
  Algorithm algorithm = Algorithm::kDSearch;
  BeamSchedule beams;
  SearchSetSpec search_set;
  int child_budget = 1;  // C, dsearch and dsearch-r
  int duplication = 1;   // svdd tree width
  ValueEstimatorSpec estimator;
  double resample_rate = 0.25;  // dsearch-r
  // dsearch-r: keep beams at or above the (1 - r_r) quantile instead of
  // dropping exactly ceil(r_r b) beams.
  bool literal_quantile = false;
  ResamplingScheme smc_resampling = ResamplingScheme::kMultinomial;
  bool smc_resample_every_step = true;  // false: only at steps in the search set
  int best_of_n = 1;
  int workers = 1;
  bool record_values = false;

  void validate() const;
  // Number of trajectories alive at time T.
  int initial_beams() const;
  int outputs() const { return beams.final; }
};

struct BeamNode {
  State state;
  int t = 0;
  std::optional<double> value;
  int lineage = 0;  // root trajectory id
  int parent = -1;  // beam index at time t + 1
  StreamKey key;
};

// Index of the highest-value child; lowest index wins ties.
std::size_t greedy_select(std::span<const BeamNode> children);

// Indices of the b_next highest-value nodes (ties to the lower index),
// returned in ascending index order.
std::vector<std::size_t> selection_top_b(std::span<const BeamNode> nodes, int b_next);

// Drop-and-replace bookkeeping for one DSearch-R step.
struct ResampleDecision {
  std::vector<std::size_t> retained;  // ascending
  std::vector<std::size_t> dropped;   // ascending
  std::vector<double> weights;        // normalized, aligned with retained
};

// Replacement weights exp(v / |max v|) over the retained set (uniform when
// max v == 0), normalized.
std::vector<double> replacement_weights(std::span<const double> retained_values);

ResampleDecision plan_replacements(std::span<const double> values, double resample_rate,
                                   bool literal_quantile);

struct StepRecord {
  int t = 0;  // diffusion time the step leaves
  int s = 0;  // forward index T - t
  int beams = 0;
  int width = 1;
  bool searched = false;
  int next_beams = 0;
  int replacements = 0;
  int unique_lineages = 0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct FinalSample {
  State state;
  double reward = 0.0;
  int lineage = 0;
  int beam = 0;
};

struct LineageRecord {
  int t = 0;
  int beam = 0;
  int lineage = 0;
  int parent = -1;
};

struct ValueTrace {
  int t = 0;
  std::vector<double> values;
};

struct RunReport {
  Algorithm algorithm = Algorithm::kDSearch;
  std::uint64_t seed = 0;
  std::vector<FinalSample> finals;  // best first
  std::vector<StepRecord> steps;    // t = T first
  BudgetLedger ledger;
  std::vector<LineageRecord> lineage;
  std::vector<ValueTrace> values;
  SearchSet search_set;

  std::vector<double> rewards() const;
  std::vector<State> states() const;
  std::vector<int> lineages() const;
};

// Search set the plan will use for `seed`.
SearchSet plan_search_set(const SearchPlan& plan, int steps, std::uint64_t seed);

// Per-step (b, w, in-A) the engine will enact, computed without running it.
// unique_lineages and replacements are left at zero.
std::vector<StepRecord> predict_schedule(const SearchPlan& plan, int steps, std::uint64_t seed);

// Sum over steps of b(t) w(t) for searched steps and b(t) otherwise.
std::int64_t predicted_denoiser_calls(std::span<const StepRecord> steps);

RunReport run_dsearch(const SearchPlan& plan, const DenoiserModel& model,
                      const RewardOracle& reward, std::uint64_t seed);
RunReport run_dsearch_r(const SearchPlan& plan, const DenoiserModel& model,
                        const RewardOracle& reward, std::uint64_t seed);
RunReport run_svdd(const SearchPlan& plan, const DenoiserModel& model,
                   const RewardOracle& reward, std::uint64_t seed);
RunReport run_smc(const SearchPlan& plan, const DenoiserModel& model,
                  const RewardOracle& reward, std::uint64_t seed);
RunReport run_best_of_n(const SearchPlan& plan, const DenoiserModel& model,
                        const RewardOracle& reward, std::uint64_t seed);
RunReport run_unguided(const SearchPlan& plan, const DenoiserModel& model,
                       const RewardOracle& reward, std::uint64_t seed);

RunReport run_search(const SearchPlan& plan, const DenoiserModel& model,
                     const RewardOracle& reward, std::uint64_t seed);

}  // namespace dsearch
