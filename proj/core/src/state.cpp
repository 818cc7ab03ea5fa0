#include "dsearch/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsearch/error.hpp"

namespace dsearch {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfiguration: return "invalid-configuration";
    case ErrorKind::kStateCorruption: return "state-corruption";
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kUndefinedMetric: return "undefined-metric";
    case ErrorKind::kCalibration: return "calibration";
    case ErrorKind::kOracleFailure: return "oracle-failure";
    case ErrorKind::kModelFailure: return "model-failure";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

bool has_mask(const TokenSeq& seq) {
  return std::find(seq.tokens.begin(), seq.tokens.end(), kMaskToken) != seq.tokens.end();
}

int mask_count(const TokenSeq& seq) {
  return static_cast<int>(std::count(seq.tokens.begin(), seq.tokens.end(), kMaskToken));
}

bool all_finite(const ContinuousVec& v) {
  return std::all_of(v.values.begin(), v.values.end(),
                     [](double x) { return std::isfinite(x); });
}

bool is_complete(const State& s) {
  if (const auto* seq = std::get_if<TokenSeq>(&s)) return !has_mask(*seq);
  return all_finite(std::get<ContinuousVec>(s));
}

std::string to_string(const State& s) {
  std::ostringstream out;
  if (const auto* seq = std::get_if<TokenSeq>(&s)) {
    for (int tok : seq->tokens) {
      if (tok == kMaskToken) {
        out << '*';
      } else if (tok < 10) {
        out << static_cast<char>('0' + tok);
      } else {
        out << '[' << tok << ']';
      }
    }
    return out.str();
  }
  const auto& v = std::get<ContinuousVec>(s).values;
  out.precision(17);
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  out << ')';
  return out.str();
}

}  // namespace dsearch
