#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace dsearch {

// What a random stream is used for. Part of the stream key so that, e.g., the
// child draws and the lookahead rollouts of the same node never alias.
enum class StreamPurpose : std::uint32_t {
  kPrior = 1,
  kChild = 2,
  kRollout = 3,
  kResample = 4,
  kSearchSet = 5,
  kForward = 6,
  kModel = 7,
  kDiagnostic = 8,
  kTest = 9,
};

// Coordinates of one stochastic draw site: (run seed, purpose, diffusion time,
// beam index, child or rollout index, free sub-index).
struct StreamKey {
  std::uint64_t seed = 0;
  StreamPurpose purpose = StreamPurpose::kTest;
  std::int64_t t = 0;
  std::int64_t beam = 0;
  std::int64_t child = 0;
  std::int64_t sub = 0;

  StreamKey with_sub(std::int64_t s) const {
    StreamKey k = *this;
    k.sub = s;
    return k;
  }

  std::uint64_t hash() const;
};

// Counter-based generator: the n-th output is a pure function of (key, n).
// Streams with distinct keys are independent, so results never depend on the
// order in which streams are consumed or on which thread consumes them.
// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(const StreamKey& key) : key_(key.hash()) {}
  explicit Rng(std::uint64_t raw_key) : key_(raw_key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Index drawn with probability proportional to `weights` (non-negative,
  // positive sum). Linear inverse-CDF scan.
  std::size_t categorical(std::span<const double> weights);
  std::uint64_t below(std::uint64_t n);
  // Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);

  // Independent child stream derived from this stream's key and `salt`.
  Rng split(std::uint64_t salt) const;

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace dsearch
