#include "dsearch/masked_model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dsearch/error.hpp"

namespace dsearch {

FactorizedSeqPrior::FactorizedSeqPrior(std::vector<std::vector<double>> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) fail(ErrorKind::kInvalidConfiguration, "sequence prior needs L >= 1", "probs");
  vocab_ = static_cast<int>(probs_.front().size());
  if (vocab_ < 1) fail(ErrorKind::kInvalidConfiguration, "sequence prior needs V >= 1", "probs");
  for (const auto& row : probs_) {
    if (static_cast<int>(row.size()) != vocab_) {
      fail(ErrorKind::kInvalidConfiguration, "ragged sequence prior table", "probs");
    }
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) fail(ErrorKind::kInvalidConfiguration, "negative probability", "probs");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      fail(ErrorKind::kInvalidConfiguration, "per-position probabilities must sum to 1", "probs");
    }
  }
}

FactorizedSeqPrior FactorizedSeqPrior::uniform(int length, int vocab) {
  if (length < 1 || vocab < 1) fail(ErrorKind::kInvalidConfiguration, "L and V must be >= 1");
  return FactorizedSeqPrior(std::vector<std::vector<double>>(
      static_cast<std::size_t>(length),
      std::vector<double>(static_cast<std::size_t>(vocab), 1.0 / vocab)));
}

FactorizedSeqPrior FactorizedSeqPrior::random(int length, int vocab, double concentration,
                                              std::uint64_t seed) {
  if (length < 1 || vocab < 1) fail(ErrorKind::kInvalidConfiguration, "L and V must be >= 1");
  if (!(concentration > 0.0)) {
    fail(ErrorKind::kInvalidConfiguration, "Dirichlet concentration must be > 0", "concentration");
  }
  Rng rng(StreamKey{seed, StreamPurpose::kModel, 0, 1, 0, 0});
  std::vector<std::vector<double>> table(static_cast<std::size_t>(length));
  for (auto& row : table) {
    row.resize(static_cast<std::size_t>(vocab));
    double total = 0.0;
    for (double& p : row) {
      p = rng.gamma(concentration);
      total += p;
    }
    for (double& p : row) p /= total;
    // Push the rounding residue into the largest entry so the row sums to 1.
    const double residue = 1.0 - std::accumulate(row.begin(), row.end(), 0.0);
    *std::max_element(row.begin(), row.end()) += residue;
  }
  return FactorizedSeqPrior(std::move(table));
}

int FactorizedSeqPrior::mode(int position) const {
  const auto& row = probs_.at(static_cast<std::size_t>(position));
  int best = 0;
  for (int v = 1; v < vocab_; ++v) {
    if (row[static_cast<std::size_t>(v)] > row[static_cast<std::size_t>(best)]) best = v;
  }
  return best;
}

double FactorizedSeqPrior::nll(std::span<const int> tokens) const {
  if (static_cast<int>(tokens.size()) != length()) {
    fail(ErrorKind::kInvalidInput, "sequence length mismatch");
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < tokens.size(); ++l) {
    const int tok = tokens[l];
    if (tok < 0 || tok >= vocab_) fail(ErrorKind::kInvalidInput, "token outside vocabulary");
    const double p = probs_[l][static_cast<std::size_t>(tok)];
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    acc -= std::log(p);
  }
  return acc;
}

MaskingSchedule::MaskingSchedule(int length, int steps, std::uint64_t order_seed)
    : steps_(steps) {
  if (length < 1) fail(ErrorKind::kInvalidConfiguration, "sequence length must be >= 1", "length");
  if (steps < 1) fail(ErrorKind::kInvalidConfiguration, "steps must be >= 1", "steps");
  order_.resize(static_cast<std::size_t>(length));
  std::iota(order_.begin(), order_.end(), 0);
  Rng rng(StreamKey{order_seed, StreamPurpose::kModel, 0, 2, 0, 0});
  for (std::size_t i = order_.size(); i > 1; --i) {
    std::swap(order_[i - 1], order_[rng.below(i)]);
  }
  rank_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    rank_[static_cast<std::size_t>(order_[i])] = static_cast<int>(i);
  }
}

int MaskingSchedule::masked_count(int t) const {
  if (t < 0 || t > steps_) fail(ErrorKind::kInvalidInput, "masking schedule: t out of range");
  return static_cast<int>((static_cast<long long>(length()) * t) / steps_);
}

std::span<const int> MaskingSchedule::revealed_between(int t) const {
  const int hi = masked_count(t);
  const int lo = masked_count(t - 1);
  return std::span<const int>(order_).subspan(static_cast<std::size_t>(lo),
                                              static_cast<std::size_t>(hi - lo));
}

bool MaskingSchedule::is_masked(int position, int t) const {
  return rank_.at(static_cast<std::size_t>(position)) < masked_count(t);
}

TokenSeq seq_predict_x0(const TokenSeq& x_t, const FactorizedSeqPrior& prior) {
  if (static_cast<int>(x_t.tokens.size()) != prior.length()) {
    fail(ErrorKind::kInvalidInput, "sequence length mismatch");
  }
  TokenSeq out{x_t.tokens, 0};
  for (std::size_t l = 0; l < out.tokens.size(); ++l) {
    if (out.tokens[l] == kMaskToken) out.tokens[l] = prior.mode(static_cast<int>(l));
  }
  return out;
}

MaskedSequenceDiffusion::MaskedSequenceDiffusion(FactorizedSeqPrior prior, int steps,
                                                 std::uint64_t order_seed)
    : prior_(std::move(prior)), schedule_(prior_.length(), steps, order_seed) {}

void MaskedSequenceDiffusion::check_consistent(const TokenSeq& seq, int t) const {
  if (t < 0 || t > steps()) fail(ErrorKind::kInvalidInput, "t out of range");
  if (static_cast<int>(seq.tokens.size()) != prior_.length()) {
    fail(ErrorKind::kStateCorruption, "sequence length does not match the model");
  }
  if (seq.time != t) {
    fail(ErrorKind::kStateCorruption, "sequence carries time " + std::to_string(seq.time) +
                                          " but was used at time " + std::to_string(t));
  }
  for (int l = 0; l < prior_.length(); ++l) {
    const int tok = seq.tokens[static_cast<std::size_t>(l)];
    const bool masked = tok == kMaskToken;
    if (masked != schedule_.is_masked(l, t)) {
      fail(ErrorKind::kStateCorruption,
           "mask pattern inconsistent with time " + std::to_string(t) + " at position " +
               std::to_string(l));
    }
    if (!masked && (tok < 0 || tok >= prior_.vocab())) {
      fail(ErrorKind::kStateCorruption, "token outside vocabulary");
    }
  }
}

State MaskedSequenceDiffusion::prior_sample(Rng&) const {
  return TokenSeq{std::vector<int>(static_cast<std::size_t>(prior_.length()), kMaskToken), steps()};
}

std::vector<State> MaskedSequenceDiffusion::reverse_children(const State& x_t, int t,
                                                             std::span<Rng> streams) const {
  const auto* seq = std::get_if<TokenSeq>(&x_t);
  if (seq == nullptr) fail(ErrorKind::kStateCorruption, "masked model expects a token sequence");
  if (t < 1) fail(ErrorKind::kInvalidInput, "reverse step: t must be >= 1");
  check_consistent(*seq, t);
  const auto revealed = schedule_.revealed_between(t);
  std::vector<State> out;
  out.reserve(streams.size());
  for (Rng& rng : streams) {
    TokenSeq child{seq->tokens, t - 1};
    for (int pos : revealed) {
      child.tokens[static_cast<std::size_t>(pos)] =
          static_cast<int>(rng.categorical(prior_.probs(pos)));
    }
    out.emplace_back(std::move(child));
  }
  return out;
}

State MaskedSequenceDiffusion::predict_x0(const State& x_t, int t) const {
  const auto* seq = std::get_if<TokenSeq>(&x_t);
  if (seq == nullptr) fail(ErrorKind::kStateCorruption, "masked model expects a token sequence");
  check_consistent(*seq, t);
  return seq_predict_x0(*seq, prior_);
}

State MaskedSequenceDiffusion::forward_noise(const State& x_0, int t, Rng&) const {
  const auto* seq = std::get_if<TokenSeq>(&x_0);
  if (seq == nullptr) fail(ErrorKind::kStateCorruption, "masked model expects a token sequence");
  check_consistent(*seq, 0);
  TokenSeq out{seq->tokens, t};
  const int m = schedule_.masked_count(t);
  for (int i = 0; i < m; ++i) {
    out.tokens[static_cast<std::size_t>(schedule_.order()[static_cast<std::size_t>(i)])] = kMaskToken;
  }
  return out;
}

std::optional<double> MaskedSequenceDiffusion::exact_nll(const State& x_0) const {
  const auto* seq = std::get_if<TokenSeq>(&x_0);
  if (seq == nullptr) fail(ErrorKind::kStateCorruption, "masked model expects a token sequence");
  if (has_mask(*seq)) fail(ErrorKind::kInvalidInput, "NLL requires a fully revealed sequence");
  return prior_.nll(seq->tokens);
}

}  // namespace dsearch
