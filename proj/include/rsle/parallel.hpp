#pragma once

// Replica-parallel map. Work is partitioned by index, results are written to
// caller-owned slots, so the outcome is independent of the thread count.

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace rsle {

inline unsigned default_thread_count() {
  if (const char* env = std::getenv("RSLE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Apply body(i) for i in [0, n). threads == 0 picks the default.
template <class Body>
void parallel_for(std::uint64_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = default_thread_count();
  if (threads <= 1 || n < 2) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  threads = static_cast<unsigned>(
      std::min<std::uint64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::uint64_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::uint64_t lo = static_cast<std::uint64_t>(t) * chunk;
    const std::uint64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::uint64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rsle
