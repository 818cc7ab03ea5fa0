#pragma once

#include <span>
#include <vector>

#include "dsearch/denoiser.hpp"

namespace dsearch {

// Independent per-position categoricals pi_l over V symbols.
class FactorizedSeqPrior {
 public:
  explicit FactorizedSeqPrior(std::vector<std::vector<double>> probs);

  static FactorizedSeqPrior uniform(int length, int vocab);
  // Each position drawn from a symmetric Dirichlet(concentration).
  static FactorizedSeqPrior random(int length, int vocab, double concentration,
                                   std::uint64_t seed);

  int length() const { return static_cast<int>(probs_.size()); }
  int vocab() const { return vocab_; }
  std::span<const double> probs(int position) const { return probs_[position]; }
  const std::vector<std::vector<double>>& table() const { return probs_; }

  // Most likely symbol at `position`, lowest index on ties.
  int mode(int position) const;
  // -log p(tokens); +inf when any token has zero probability.
  double nll(std::span<const int> tokens) const;

 private:
  std::vector<std::vector<double>> probs_;
  int vocab_ = 0;
};

// Positions are masked in a fixed pseudo-random order: at time t the first
// floor(L t / T) positions of the order are masked.
class MaskingSchedule {
 public:
  MaskingSchedule(int length, int steps, std::uint64_t order_seed);

  int length() const { return static_cast<int>(order_.size()); }
  int steps() const { return steps_; }
  int masked_count(int t) const;
  std::span<const int> order() const { return order_; }
  // Positions that become visible when stepping from t to t-1.
  std::span<const int> revealed_between(int t) const;
  bool is_masked(int position, int t) const;

 private:
  int steps_;
  std::vector<int> order_;
  std::vector<int> rank_;  // rank_[position] = index within order_
};

TokenSeq seq_predict_x0(const TokenSeq& x_t, const FactorizedSeqPrior& prior);

class MaskedSequenceDiffusion final : public DenoiserModel {
 public:
  MaskedSequenceDiffusion(FactorizedSeqPrior prior, int steps, std::uint64_t order_seed = 0);

  int steps() const override { return schedule_.steps(); }
  std::string name() const override { return "masked-sequence"; }

  State prior_sample(Rng& rng) const override;
  std::vector<State> reverse_children(const State& x_t, int t,
                                      std::span<Rng> streams) const override;
  using DenoiserModel::reverse_children;
  State predict_x0(const State& x_t, int t) const override;
  State forward_noise(const State& x_0, int t, Rng& rng) const override;
  std::optional<double> exact_nll(const State& x_0) const override;

  // Throws kStateCorruption unless the mask pattern of `seq` matches time t.
  void check_consistent(const TokenSeq& seq, int t) const;

  const FactorizedSeqPrior& prior() const { return prior_; }
  const MaskingSchedule& schedule() const { return schedule_; }

 private:
  FactorizedSeqPrior prior_;
  MaskingSchedule schedule_;
};

}  // namespace dsearch
