#include "dsearch/denoiser.hpp"

#include "dsearch/error.hpp"

namespace dsearch {

std::vector<State> DenoiserModel::reverse_children(const State& x_t, int t, int n,
                                                   Rng& rng) const {
  if (n < 1) fail(ErrorKind::kInvalidConfiguration, "child count must be >= 1");
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(n));
  const std::uint64_t base = rng();
  for (int i = 0; i < n; ++i) streams.push_back(Rng(base).split(static_cast<std::uint64_t>(i)));
  return reverse_children(x_t, t, streams);
}

}  // namespace dsearch
