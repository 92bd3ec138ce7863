#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace cascadelab::par {

namespace detail {
inline std::atomic<int>& worker_slot() {
  static std::atomic<int> n{1};
  return n;
}
}  // namespace detail

inline int worker_threads() { return detail::worker_slot().load(); }

inline void set_worker_threads(int n) {
  detail::worker_slot().store(std::max(1, n));
}

inline int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Deterministic parallel map over [0, n): the body writes results keyed by
/// index, so the outcome is independent of the worker count. Static block
/// partition, one thread per block.
template <class F>
void for_index(std::int64_t n, F&& body) {
  const int threads = std::min<std::int64_t>(worker_threads(), n);
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::int64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cascadelab::par
