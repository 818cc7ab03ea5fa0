#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dsearch/config.hpp"
#include "dsearch/gmm_model.hpp"
#include "dsearch/masked_model.hpp"
#include "dsearch/reward.hpp"
#include "dsearch/search.hpp"

namespace dsearch::testing {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct SignTest {
  int wins = 0;
  int losses = 0;
  int ties = 0;
  double p = 1.0;  // one-sided P(Bin(wins + losses, 1/2) >= wins)
};

// Paired one-sided sign test that a[i] > b[i]; ties are dropped.
inline SignTest sign_test(std::span<const double> a, std::span<const double> b) {
  SignTest s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      ++s.wins;
    } else if (a[i] < b[i]) {
      ++s.losses;
    } else {
      ++s.ties;
    }
  }
  const int n = s.wins + s.losses;
  if (n == 0) return s;
  double p = 0.0;
  for (int k = s.wins; k <= n; ++k) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
  }
  s.p = std::min(1.0, p);
  return s;
}

// The L = 6, V = 4 sequence toy used by the value-estimation examples.
inline MaskedSequenceDiffusion seq_toy(int steps = 12, std::uint64_t order_seed = 3) {
  return MaskedSequenceDiffusion(FactorizedSeqPrior::random(6, 4, 1.0, 17), steps, order_seed);
}

inline GaussianMixtureDiffusion gmm_toy(int steps = 12,
                                        GaussianReverseKernel kernel = GaussianReverseKernel::kPosteriorMeanPlugIn) {
  GmmPrior prior({{0.3, {-1.0, 0.5}, 0.2}, {0.7, {1.5, -0.5}, 0.4}});
  return GaussianMixtureDiffusion(prior, NoiseSchedule::build(NoiseScheduleKind::kLinearBeta, steps), kernel);
}

// Bit-exact comparison of two run outputs.
inline bool same_finals(const RunReport& a, const RunReport& b) {
  if (a.finals.size() != b.finals.size()) return false;
  for (std::size_t i = 0; i < a.finals.size(); ++i) {
    if (!(a.finals[i].state == b.finals[i].state) || a.finals[i].reward != b.finals[i].reward) return false;
  }
  return true;
}

}  // namespace dsearch::testing
