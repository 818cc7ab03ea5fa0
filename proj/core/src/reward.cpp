#include "dsearch/reward.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "dsearch/error.hpp"
#include "dsearch/rng.hpp"

namespace dsearch {

namespace {

const TokenSeq& as_sequence(const State& s, std::string_view who) {
  const auto* seq = std::get_if<TokenSeq>(&s);
  if (seq == nullptr) {
    fail(ErrorKind::kOracleFailure, std::string(who) + " expects a token sequence");
  }
  return *seq;
}

const ContinuousVec& as_vector(const State& s, std::string_view who) {
  const auto* v = std::get_if<ContinuousVec>(&s);
  if (v == nullptr) fail(ErrorKind::kOracleFailure, std::string(who) + " expects a vector state");
  return *v;
}

int symbol_index(char c) {
  switch (c) {
    case 'A': case 'a': return 0;
    case 'C': case 'c': return 1;
    case 'G': case 'g': return 2;
    case 'T': case 't': return 3;
    default: break;
  }
  if (c >= '0' && c <= '9') return c - '0';
  fail(ErrorKind::kInvalidConfiguration, std::string("bad motif symbol '") + c + "'", "reward");
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::kInvalidConfiguration, "bad number '" + std::string(text) + "'", "reward");
  }
  return value;
}

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  return out.str();
}

}  // namespace

MotifCountReward::MotifCountReward(std::vector<int> pattern) : pattern_(std::move(pattern)) {
  if (pattern_.empty()) fail(ErrorKind::kInvalidConfiguration, "empty motif", "reward");
}

double MotifCountReward::evaluate(const State& x0) const {
  const auto& toks = as_sequence(x0, "motif-count").tokens;
  if (toks.size() < pattern_.size()) return 0.0;
  int count = 0;
  for (std::size_t i = 0; i + pattern_.size() <= toks.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < pattern_.size() && hit; ++j) hit = toks[i + j] == pattern_[j];
    count += hit ? 1 : 0;
  }
  return count;
}

std::string MotifCountReward::name() const {
  std::string s = "motif-count:";
  for (int p : pattern_) s += std::to_string(p);
  return s;
}

GcBandReward::GcBandReward(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo <= hi)) fail(ErrorKind::kInvalidConfiguration, "gc-band needs lo <= hi", "reward");
}

double GcBandReward::evaluate(const State& x0) const {
  const auto& toks = as_sequence(x0, "gc-band").tokens;
  if (toks.empty()) return 0.0;
  int gc = 0;
  for (int t : toks) gc += (t == 1 || t == 2) ? 1 : 0;
  const double frac = static_cast<double>(gc) / static_cast<double>(toks.size());
  if (frac < lo_) return -(lo_ - frac);
  if (frac > hi_) return -(frac - hi_);
  return 1.0;
}

std::string GcBandReward::name() const { return "gc-band:" + join({lo_, hi_}); }

double LookupHashReward::evaluate(const State& x0) const {
  const auto& toks = as_sequence(x0, "lookup-hash").tokens;
  std::uint64_t h = 0x5bd1e9955bd1e995ULL;
  for (int t : toks) h = mix64(h ^ static_cast<std::uint64_t>(t + 1));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

NegSqDistReward::NegSqDistReward(std::vector<double> center) : center_(std::move(center)) {
  if (center_.empty()) fail(ErrorKind::kInvalidConfiguration, "neg-sq-dist needs a center", "reward");
}

double NegSqDistReward::evaluate(const State& x0) const {
  const auto& x = as_vector(x0, "neg-sq-dist").values;
  if (center_.size() != 1 && center_.size() != x.size()) {
    fail(ErrorKind::kOracleFailure, "neg-sq-dist center dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - center_[center_.size() == 1 ? 0 : i];
    acc += d * d;
  }
  return -acc;
}

std::string NegSqDistReward::name() const { return "neg-sq-dist:" + join(center_); }

IndicatorBoxReward::IndicatorBoxReward(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo <= hi)) fail(ErrorKind::kInvalidConfiguration, "indicator-box needs lo <= hi", "reward");
}

double IndicatorBoxReward::evaluate(const State& x0) const {
  for (double v : as_vector(x0, "indicator-box").values) {
    if (v < lo_ || v > hi_) return 0.0;
  }
  return 1.0;
}

std::string IndicatorBoxReward::name() const { return "indicator-box:" + join({lo_, hi_}); }

std::unique_ptr<RewardOracle> make_reward_oracle(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view args =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  if (kind == "motif-count") {
    if (args.empty()) fail(ErrorKind::kInvalidConfiguration, "motif-count needs a pattern", "reward");
    std::vector<int> pattern;
    for (char c : args) pattern.push_back(symbol_index(c));
    return std::make_unique<MotifCountReward>(std::move(pattern));
  }
  if (kind == "gc-band") {
    const auto v = parse_numbers(args);
    if (v.size() != 2) fail(ErrorKind::kInvalidConfiguration, "gc-band needs <lo>,<hi>", "reward");
    return std::make_unique<GcBandReward>(v[0], v[1]);
  }
  if (kind == "lookup-hash") {
    if (!args.empty()) fail(ErrorKind::kInvalidConfiguration, "lookup-hash takes no arguments", "reward");
    return std::make_unique<LookupHashReward>();
  }
  if (kind == "neg-sq-dist") {
    if (args.empty()) fail(ErrorKind::kInvalidConfiguration, "neg-sq-dist needs a center", "reward");
    return std::make_unique<NegSqDistReward>(parse_numbers(args));
  }
  if (kind == "indicator-box") {
    if (args.empty()) return std::make_unique<IndicatorBoxReward>();
    const auto v = parse_numbers(args);
    if (v.size() != 2) fail(ErrorKind::kInvalidConfiguration, "indicator-box needs <lo>,<hi>", "reward");
    return std::make_unique<IndicatorBoxReward>(v[0], v[1]);
  }
  fail(ErrorKind::kInvalidConfiguration, "unknown reward oracle '" + std::string(spec) + "'",
       "reward");
}

}  // namespace dsearch
