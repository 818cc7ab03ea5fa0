#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dsearch/budget.hpp"
#include "dsearch/denoiser.hpp"
#include "dsearch/masked_model.hpp"
#include "dsearch/reward.hpp"
#include "dsearch/rng.hpp"

namespace dsearch {

enum class ValueMode { kOneStep, kLookahead };
enum class Pooling { kMean, kMax };

ValueMode parse_value_mode(std::string_view name);
Pooling parse_pooling(std::string_view name);
std::string_view to_string(ValueMode mode);
std::string_view to_string(Pooling pooling);

struct ValueEstimatorSpec {
  ValueMode mode = ValueMode::kOneStep;
  int lookahead_steps = 1;  // K; 0 means the one-step heuristic
  int duplicates = 1;       // M
  Pooling pooling = Pooling::kMax;
  double alpha = 1.0;  // temperature for SMC weights and the soft-value oracle

  void validate() const;
};

// Reward call with accounting and input checks. Oracle failures are rethrown
// as kOracleFailure with `context` prepended.
double evaluate_reward(const RewardOracle& reward, const State& x0, CallCounters& counters,
                       std::string_view context = {});

// r(x0_hat(x_t)).
double one_step_value(const State& x_t, int t, const DenoiserModel& model,
                      const RewardOracle& reward, CallCounters& counters);

// The M pooled samples r(x0_hat(x_{t-K}^{(s)})); rollout s draws from
// key.with_sub(s).
std::vector<double> lookahead_rewards(const State& x_t, int t, int lookahead_steps,
                                      int duplicates, const DenoiserModel& model,
                                      const RewardOracle& reward, CallCounters& counters,
                                      const StreamKey& key);

double pool(std::span<const double> samples, Pooling pooling);

// K = 0 (or mode one-step) reduces to one_step_value. K > t is an error.
double lookahead_value(const State& x_t, int t, const ValueEstimatorSpec& spec,
                       const DenoiserModel& model, const RewardOracle& reward,
                       CallCounters& counters, const StreamKey& key);

// Node heuristic used by the search engine: lookahead with K clamped to t.
class ValueEstimator {
 public:
  ValueEstimator(ValueEstimatorSpec spec, const DenoiserModel& model, const RewardOracle& reward);

  double operator()(const State& x_t, int t, CallCounters& counters, const StreamKey& key) const;
  const ValueEstimatorSpec& spec() const { return spec_; }

 private:
  ValueEstimatorSpec spec_;
  const DenoiserModel* model_;
  const RewardOracle* reward_;
};

// Exhaustive test oracles for the factorized sequence toy. Both enumerate all
// V^m completions of the m masked positions and refuse m > 12.
inline constexpr int kMaxEnumeratedMasks = 12;

double oracle_conditional_mean_reward(const TokenSeq& x_t, const FactorizedSeqPrior& prior,
                                      const RewardOracle& reward);

// alpha log E[exp(r(x_0) / alpha) | x_t], accumulated with a running
// log-sum-exp.
double oracle_soft_value(const TokenSeq& x_t, const FactorizedSeqPrior& prior,
                         const RewardOracle& reward, double alpha);

// Largest reward over completions with positive probability.
double oracle_max_reward(const TokenSeq& x_t, const FactorizedSeqPrior& prior,
                         const RewardOracle& reward);

}  // namespace dsearch
