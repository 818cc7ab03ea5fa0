#include "dsearch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "dsearch/budget.hpp"
#include "dsearch/error.hpp"
#include "dsearch/parallel.hpp"
#include "dsearch/value.hpp"

namespace dsearch {

RewardStats reward_stats(std::span<const double> rewards) {
  if (rewards.empty()) fail(ErrorKind::kInvalidInput, "reward_stats: empty list");
  std::vector<double> v(rewards.begin(), rewards.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  RewardStats s;
  s.median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(n));
  return s;
}

double diversity(std::span<const State> samples) {
  if (samples.size() < 2) fail(ErrorKind::kUndefinedMetric, "diversity needs at least 2 samples");
  const bool sequences = std::holds_alternative<TokenSeq>(samples.front());
  for (const auto& s : samples) {
    if (std::holds_alternative<TokenSeq>(s) != sequences) {
      fail(ErrorKind::kInvalidInput, "diversity: mixed state variants");
    }
  }
  const std::size_t n = samples.size();
  double total = 0.0;
  double largest = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      double d = 0.0;
      if (sequences) {
        const auto& x = std::get<TokenSeq>(samples[a]).tokens;
        const auto& y = std::get<TokenSeq>(samples[b]).tokens;
        if (x.size() != y.size() || x.empty()) {
          fail(ErrorKind::kInvalidInput, "diversity: sequences differ in length");
        }
        int diff = 0;
        for (std::size_t l = 0; l < x.size(); ++l) diff += x[l] != y[l] ? 1 : 0;
        d = static_cast<double>(diff) / static_cast<double>(x.size());
      } else {
        const auto& x = std::get<ContinuousVec>(samples[a]).values;
        const auto& y = std::get<ContinuousVec>(samples[b]).values;
        if (x.size() != y.size()) fail(ErrorKind::kInvalidInput, "diversity: dimension mismatch");
        double ss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ss += (x[i] - y[i]) * (x[i] - y[i]);
        d = std::sqrt(ss);
      }
      total += d;
      largest = std::max(largest, d);
    }
  }
  const double mean = total / (static_cast<double>(n * (n - 1)) / 2.0);
  if (sequences) return mean;
  return largest > 0.0 ? mean / largest : 0.0;
}

double lineage_diversity(std::span<const int> lineages) {
  if (lineages.empty()) fail(ErrorKind::kUndefinedMetric, "lineage diversity of no samples");
  const std::set<int> unique(lineages.begin(), lineages.end());
  return static_cast<double>(unique.size()) / static_cast<double>(lineages.size());
}

NllSummary nll_report(std::span<const State> samples, const DenoiserModel& model) {
  if (samples.empty()) fail(ErrorKind::kInvalidInput, "nll_report: no samples");
  NllSummary out;
  double acc = 0.0;
  for (const auto& s : samples) {
    const auto nll = model.exact_nll(s);
    if (!nll) fail(ErrorKind::kUndefinedMetric, "model '" + model.name() + "' has no exact density");
    if (std::isinf(*nll)) ++out.zero_probability;
    acc += *nll;
    ++out.count;
  }
  out.mean = out.zero_probability > 0 ? std::numeric_limits<double>::infinity()
                                      : acc / static_cast<double>(out.count);
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::kInvalidInput, "pearson: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CheckpointTrace simulate_checkpoints(const DenoiserModel& model, const RewardOracle& reward,
                                     std::span<const int> checkpoints, int trajectories,
                                     std::uint64_t seed, int workers) {
  const int T = model.steps();
  for (int c : checkpoints) {
    if (c < 1 || c > T) {
      fail(ErrorKind::kInvalidConfiguration, "checkpoint " + std::to_string(c) + " outside [1, T]",
           "checkpoints");
    }
  }
  if (trajectories < 1) fail(ErrorKind::kInvalidConfiguration, "need >= 1 trajectory");
  const auto n = static_cast<std::size_t>(trajectories);
  CheckpointTrace trace;
  trace.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  trace.states.assign(checkpoints.size(), std::vector<State>(n));
  trace.finals.resize(n);
  trace.final_rewards.resize(n);
  parallel_for(n, workers, [&](std::size_t j) {
    Rng prior_rng(StreamKey{seed, StreamPurpose::kDiagnostic, T, static_cast<std::int64_t>(j), 0, 1});
    State x = model.prior_sample(prior_rng);
    for (int t = T; t >= 0; --t) {
      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        if (checkpoints[c] == t) trace.states[c][j] = x;
      }
      if (t == 0) break;
      Rng rng(StreamKey{seed, StreamPurpose::kDiagnostic, t, static_cast<std::int64_t>(j), 0, 0});
      x = std::move(model.reverse_children(x, t, std::span<Rng>(&rng, 1)).front());
    }
    CallCounters scratch;
    trace.final_rewards[j] = evaluate_reward(reward, x, scratch);
    trace.finals[j] = std::move(x);
  });
  return trace;
}

std::vector<CheckpointCorrelation> value_correlation_diagnostic(
    const DenoiserModel& model, const CheckpointValueFn& estimator, const RewardOracle& reward,
    std::span<const int> checkpoints, int trajectories, std::uint64_t seed, int workers) {
  if (trajectories < 10) {
    fail(ErrorKind::kInvalidConfiguration, "diagnostic needs >= 10 trajectories", "trajectories");
  }
  const auto trace = simulate_checkpoints(model, reward, checkpoints, trajectories, seed, workers);
  std::vector<CheckpointCorrelation> out;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::vector<double> est(static_cast<std::size_t>(trajectories));
    parallel_for(est.size(), workers, [&](std::size_t j) {
      est[j] = estimator(trace.states[c][j], checkpoints[c], j);
    });
    out.push_back(CheckpointCorrelation{checkpoints[c], pearson(est, trace.final_rewards), trajectories});
  }
  return out;
}

}  // namespace dsearch
