#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dsearch/denoiser.hpp"
#include "dsearch/reward.hpp"
#include "dsearch/state.hpp"

namespace dsearch {

struct RewardStats {
  double median = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by n)
};

RewardStats reward_stats(std::span<const double> rewards);

// Sequences: mean pairwise normalized Hamming distance.
// Vectors: mean pairwise Euclidean distance over the maximum pairwise
// distance, 0 when all samples coincide.
double diversity(std::span<const State> samples);

// Distinct root lineages over sample count.
double lineage_diversity(std::span<const int> lineages);

struct NllSummary {
  double mean = 0.0;  // +inf when any sample has zero probability
  int zero_probability = 0;
  int count = 0;
};

NllSummary nll_report(std::span<const State> samples, const DenoiserModel& model);

// Undefined (nullopt) when either series has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct MetricReport {
  RewardStats reward;
  double diversity = 0.0;
  double lineage_diversity = 0.0;
  NllSummary nll;
};

// Unguided trajectories recorded at the requested checkpoints.
struct CheckpointTrace {
  std::vector<int> checkpoints;
  std::vector<std::vector<State>> states;  // [checkpoint][trajectory]
  std::vector<State> finals;
  std::vector<double> final_rewards;
};

CheckpointTrace simulate_checkpoints(const DenoiserModel& model, const RewardOracle& reward,
                                     std::span<const int> checkpoints, int trajectories,
                                     std::uint64_t seed, int workers = 1);

// Value estimate for trajectory `trajectory` at time t.
using CheckpointValueFn = std::function<double(const State& x_t, int t, std::size_t trajectory)>;

struct CheckpointCorrelation {
  int t = 0;
  std::optional<double> pearson;
  int n = 0;
};

std::vector<CheckpointCorrelation> value_correlation_diagnostic(
    const DenoiserModel& model, const CheckpointValueFn& estimator, const RewardOracle& reward,
    std::span<const int> checkpoints, int trajectories, std::uint64_t seed, int workers = 1);

}  // namespace dsearch
