#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dsearch/state.hpp"

namespace dsearch {

// Black-box reward r: X -> R over fully denoised states.
class RewardOracle {
 public:
  virtual ~RewardOracle() = default;
  virtual double evaluate(const State& x0) const = 0;
  virtual std::string name() const = 0;
  virtual bool deterministic() const { return true; }
};

// Number of (possibly overlapping) occurrences of `pattern`.
class MotifCountReward final : public RewardOracle {
 public:
  explicit MotifCountReward(std::vector<int> pattern);
  double evaluate(const State& x0) const override;
  std::string name() const override;

 private:
  std::vector<int> pattern_;
};

// 1 inside [lo, hi] for the fraction of C/G symbols (indices 1 and 2), minus
// the distance to the band outside it.
class GcBandReward final : public RewardOracle {
 public:
  GcBandReward(double lo, double hi);
  double evaluate(const State& x0) const override;
  std::string name() const override;

 private:
  double lo_;
  double hi_;
};

// Pseudo-random value in [0, 1) keyed by the full sequence.
class LookupHashReward final : public RewardOracle {
 public:
  double evaluate(const State& x0) const override;
  std::string name() const override { return "lookup-hash"; }
};

// -||x - c||^2. A single center value is broadcast over all coordinates.
class NegSqDistReward final : public RewardOracle {
 public:
  explicit NegSqDistReward(std::vector<double> center);
  double evaluate(const State& x0) const override;
  std::string name() const override;

 private:
  std::vector<double> center_;
};

// 1 when every coordinate lies in [lo, hi], else 0.
class IndicatorBoxReward final : public RewardOracle {
 public:
  IndicatorBoxReward(double lo = 0.0, double hi = 1.0);
  double evaluate(const State& x0) const override;
  std::string name() const override;

 private:
  double lo_;
  double hi_;
};

// Adapter for ad-hoc rewards, mostly test stubs.
class FunctionReward final : public RewardOracle {
 public:
  FunctionReward(std::string name, std::function<double(const State&)> fn,
                 bool deterministic = true)
      : name_(std::move(name)), fn_(std::move(fn)), deterministic_(deterministic) {}
  double evaluate(const State& x0) const override { return fn_(x0); }
  std::string name() const override { return name_; }
  bool deterministic() const override { return deterministic_; }

 private:
  std::string name_;
  std::function<double(const State&)> fn_;
  bool deterministic_;
};

// Parses "motif-count:<pattern>", "gc-band:<lo>,<hi>", "lookup-hash",
// "neg-sq-dist:<c1>[,<c2>...]", "indicator-box[:<lo>,<hi>]".
// Pattern symbols are digits or A/C/G/T.
std::unique_ptr<RewardOracle> make_reward_oracle(std::string_view spec);

}  // namespace dsearch
