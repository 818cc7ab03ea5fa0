#include "dsearch/value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dsearch/error.hpp"

namespace dsearch {

ValueMode parse_value_mode(std::string_view name) {
  if (name == "one-step") return ValueMode::kOneStep;
  if (name == "lookahead") return ValueMode::kLookahead;
  fail(ErrorKind::kInvalidConfiguration, "unknown estimator mode '" + std::string(name) + "'",
       "estimator.mode");
}

Pooling parse_pooling(std::string_view name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "max") return Pooling::kMax;
  fail(ErrorKind::kInvalidConfiguration, "unknown pooling '" + std::string(name) + "'",
       "estimator.pooling");
}

std::string_view to_string(ValueMode mode) {
  return mode == ValueMode::kOneStep ? "one-step" : "lookahead";
}

std::string_view to_string(Pooling pooling) {
  return pooling == Pooling::kMean ? "mean" : "max";
}

void ValueEstimatorSpec::validate() const {
  if (lookahead_steps < 0) {
    fail(ErrorKind::kInvalidConfiguration, "lookahead steps K must be >= 0", "estimator.lookahead_steps");
  }
  if (duplicates < 1) {
    fail(ErrorKind::kInvalidConfiguration, "duplication size M must be >= 1", "estimator.duplicates");
  }
  if (!(alpha >= 0.0)) fail(ErrorKind::kInvalidConfiguration, "alpha must be >= 0", "estimator.alpha");
}

double evaluate_reward(const RewardOracle& reward, const State& x0, CallCounters& counters,
                       std::string_view context) {
  if (!is_complete(x0)) {
    fail(ErrorKind::kOracleFailure,
         std::string(context) + "reward oracle '" + reward.name() +
             "' refused an incomplete state " + to_string(x0));
  }
  counters.reward_calls.fetch_add(1, std::memory_order_relaxed);
  try {
    return reward.evaluate(x0);
  } catch (const std::exception& e) {
    fail(ErrorKind::kOracleFailure,
         std::string(context) + "reward oracle '" + reward.name() + "' failed: " + e.what());
  }
}

double one_step_value(const State& x_t, int t, const DenoiserModel& model,
                      const RewardOracle& reward, CallCounters& counters) {
  if (t < 0 || t > model.steps()) fail(ErrorKind::kInvalidInput, "one_step_value: t out of range");
  counters.x0_calls.fetch_add(1, std::memory_order_relaxed);
  const State x0 = model.predict_x0(x_t, t);
  return evaluate_reward(reward, x0, counters, "t=" + std::to_string(t) + ": ");
}

std::vector<double> lookahead_rewards(const State& x_t, int t, int lookahead_steps,
                                      int duplicates, const DenoiserModel& model,
                                      const RewardOracle& reward, CallCounters& counters,
                                      const StreamKey& key) {
  if (lookahead_steps > t) {
    fail(ErrorKind::kInvalidConfiguration,
         "lookahead K=" + std::to_string(lookahead_steps) + " exceeds t=" + std::to_string(t),
         "estimator.lookahead_steps");
  }
  if (lookahead_steps < 1 || duplicates < 1) {
    fail(ErrorKind::kInvalidConfiguration, "lookahead needs K >= 1 and M >= 1");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(duplicates));
  for (int s = 0; s < duplicates; ++s) {
    Rng rng(key.with_sub(s));
    State x = x_t;
    for (int k = 0; k < lookahead_steps; ++k) {
      x = std::move(model.reverse_children(x, t - k, std::span<Rng>(&rng, 1)).front());
      counters.lookahead_calls.fetch_add(1, std::memory_order_relaxed);
    }
    out.push_back(one_step_value(x, t - lookahead_steps, model, reward, counters));
  }
  return out;
}

double pool(std::span<const double> samples, Pooling pooling) {
  if (samples.empty()) fail(ErrorKind::kInvalidInput, "pool: no samples");
  if (pooling == Pooling::kMax) return *std::max_element(samples.begin(), samples.end());
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

double lookahead_value(const State& x_t, int t, const ValueEstimatorSpec& spec,
                       const DenoiserModel& model, const RewardOracle& reward,
                       CallCounters& counters, const StreamKey& key) {
  spec.validate();
  if (spec.mode == ValueMode::kOneStep || spec.lookahead_steps == 0) {
    return one_step_value(x_t, t, model, reward, counters);
  }
  const auto samples =
      lookahead_rewards(x_t, t, spec.lookahead_steps, spec.duplicates, model, reward, counters, key);
  return pool(samples, spec.pooling);
}

ValueEstimator::ValueEstimator(ValueEstimatorSpec spec, const DenoiserModel& model,
                               const RewardOracle& reward)
    : spec_(spec), model_(&model), reward_(&reward) {
  spec_.validate();
}

double ValueEstimator::operator()(const State& x_t, int t, CallCounters& counters,
                                  const StreamKey& key) const {
  ValueEstimatorSpec local = spec_;
  local.lookahead_steps = std::min(local.lookahead_steps, t);
  return lookahead_value(x_t, t, local, *model_, *reward_, counters, key);
}

namespace {

// Calls visit(completion, probability) for every completion of the masked
// positions with non-zero probability.
template <typename Visit>
void enumerate_completions(const TokenSeq& x_t, const FactorizedSeqPrior& prior, Visit&& visit) {
  if (static_cast<int>(x_t.tokens.size()) != prior.length()) {
    fail(ErrorKind::kInvalidInput, "sequence length mismatch");
  }
  std::vector<int> masked;
  for (int l = 0; l < prior.length(); ++l) {
    if (x_t.tokens[static_cast<std::size_t>(l)] == kMaskToken) masked.push_back(l);
  }
  if (static_cast<int>(masked.size()) > kMaxEnumeratedMasks) {
    fail(ErrorKind::kInvalidConfiguration,
         "refusing to enumerate " + std::to_string(masked.size()) + " masked positions (max " +
             std::to_string(kMaxEnumeratedMasks) + ")");
  }
  const int V = prior.vocab();
  TokenSeq cur{x_t.tokens, 0};
  std::vector<int> digits(masked.size(), 0);
  for (;;) {
    double p = 1.0;
    for (std::size_t i = 0; i < masked.size(); ++i) {
      cur.tokens[static_cast<std::size_t>(masked[i])] = digits[i];
      p *= prior.probs(masked[i])[static_cast<std::size_t>(digits[i])];
    }
    if (p > 0.0) visit(static_cast<const State&>(State{cur}), p);
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == V) digits[i++] = 0;
    if (i == digits.size()) break;
  }
}

}  // namespace

double oracle_conditional_mean_reward(const TokenSeq& x_t, const FactorizedSeqPrior& prior,
                                      const RewardOracle& reward) {
  double acc = 0.0;
  double mass = 0.0;
  enumerate_completions(x_t, prior, [&](const State& s, double p) {
    acc += p * reward.evaluate(s);
    mass += p;
  });
  return acc / mass;
}

double oracle_soft_value(const TokenSeq& x_t, const FactorizedSeqPrior& prior,
                         const RewardOracle& reward, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorKind::kInvalidConfiguration, "soft value needs alpha > 0", "alpha");
  // Running log-sum-exp of log p + r / alpha.
  double m = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  double mass = 0.0;
  enumerate_completions(x_t, prior, [&](const State& s, double p) {
    const double e = std::log(p) + reward.evaluate(s) / alpha;
    if (e > m) {
      acc = acc * std::exp(m - e) + 1.0;
      m = e;
    } else {
      acc += std::exp(e - m);
    }
    mass += p;
  });
  return alpha * (m + std::log(acc) - std::log(mass));
}

double oracle_max_reward(const TokenSeq& x_t, const FactorizedSeqPrior& prior,
                         const RewardOracle& reward) {
  double best = -std::numeric_limits<double>::infinity();
  enumerate_completions(x_t, prior,
                        [&](const State& s, double) { best = std::max(best, reward.evaluate(s)); });
  return best;
}

}  // namespace dsearch
