#pragma once

#include <string>
#include <variant>
#include <vector>

namespace dsearch {

inline constexpr int kMaskToken = -1;

struct ContinuousVec {
  std::vector<double> values;

  friend bool operator==(const ContinuousVec&, const ContinuousVec&) = default;
};

// `time` is the diffusion time the sequence belongs to; the mask pattern must
// agree with the model's masking schedule at that time.
struct TokenSeq {
  std::vector<int> tokens;
  int time = 0;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

using State = std::variant<ContinuousVec, TokenSeq>;

bool has_mask(const TokenSeq& seq);
int mask_count(const TokenSeq& seq);
bool all_finite(const ContinuousVec& v);

// True when the state can be handed to a reward oracle: no MASK tokens and no
// non-finite coordinates.
bool is_complete(const State& s);

std::string to_string(const State& s);

}  // namespace dsearch
