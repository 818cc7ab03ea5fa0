#include "dsearch/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace dsearch {

int worker_cap() {
  const char* env = std::getenv("DSEARCH_MAX_JOBS");
  if (env == nullptr) return std::numeric_limits<int>::max();
  int value = 0;
  const char* end = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end || value < 1) return std::numeric_limits<int>::max();
  return value;
}

int effective_workers(int requested) {
  return std::clamp(requested, 1, worker_cap());
}

}  // namespace dsearch
