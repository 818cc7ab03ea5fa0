#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dsearch {

// Upper bound on worker threads from DSEARCH_MAX_JOBS (unset or invalid: no cap).
int worker_cap();

// Clamp a requested worker count to [1, worker_cap()].
int effective_workers(int requested);

// Runs fn(i) for i in [0, n) on up to `workers` threads. fn must only touch
// state owned by index i. The first exception thrown is rethrown after all
// workers have joined.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, effective_workers(workers)));
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  const std::size_t spawn = std::min(threads, n) - 1;
  pool.reserve(spawn);
  for (std::size_t k = 0; k < spawn; ++k) pool.emplace_back(work);
  work();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace dsearch
