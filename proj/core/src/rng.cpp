#include "dsearch/rng.hpp"

#include <cmath>
#include <numbers>

#include "dsearch/error.hpp"

namespace dsearch {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fold(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ mix64(v + 0x632be59bd9b4e019ULL));
}

}  // namespace

std::uint64_t StreamKey::hash() const {
  std::uint64_t h = mix64(seed);
  h = fold(h, static_cast<std::uint64_t>(purpose));
  h = fold(h, static_cast<std::uint64_t>(t));
  h = fold(h, static_cast<std::uint64_t>(beam));
  h = fold(h, static_cast<std::uint64_t>(child));
  h = fold(h, static_cast<std::uint64_t>(sub));
  return h;
}

Rng::result_type Rng::operator()() {
  return mix64(key_ ^ mix64(counter_++ * 0xd1b54a32d192ed03ULL));
}

double Rng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::kInvalidInput, "categorical weight must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    fail(ErrorKind::kInvalidInput, "categorical weights sum to zero");
  }
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) fail(ErrorKind::kInvalidInput, "below(0)");
  // Reject the low residue class so every value mod n is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = (*this)();
    if (x >= threshold) return x % n;
  }
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) fail(ErrorKind::kInvalidInput, "gamma shape must be > 0");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Rng Rng::split(std::uint64_t salt) const {
  return Rng(fold(key_ ^ 0xa0761d6478bd642fULL, salt));
}

}  // namespace dsearch
