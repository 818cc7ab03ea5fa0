#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsearch/rng.hpp"
#include "dsearch/state.hpp"

namespace dsearch {

// The pretrained-model surface the search consumes. Implementations must be
// safe for concurrent const calls; every draw comes from a caller-supplied
// stream.
class DenoiserModel {
 public:
  virtual ~DenoiserModel() = default;

  virtual int steps() const = 0;
  virtual std::string name() const = 0;

  // A state at diffusion time T.
  virtual State prior_sample(Rng& rng) const = 0;

  // One child at time t-1 per stream in `streams`.
  virtual std::vector<State> reverse_children(const State& x_t, int t,
                                              std::span<Rng> streams) const = 0;

  // `n` children at time t-1 drawn from `rng` (via n split sub-streams).
  std::vector<State> reverse_children(const State& x_t, int t, int n, Rng& rng) const;

  // Estimate of E[x_0 | x_t]. At t = 0 this is the identity.
  virtual State predict_x0(const State& x_t, int t) const = 0;

  virtual State forward_noise(const State& x_0, int t, Rng& rng) const = 0;

  // -log p(x_0) when the model has a tractable density.
  virtual std::optional<double> exact_nll(const State&) const { return std::nullopt; }
};

}  // namespace dsearch
