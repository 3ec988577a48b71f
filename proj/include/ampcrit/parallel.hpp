#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace ampcrit {

inline int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(i) for i in [0, n). Work items are claimed through an atomic index;
// callers must write results into per-index slots so the outcome does not
// depend on scheduling.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
  threads = effective_threads(threads);
  if (threads <= 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nt = static_cast<int>(std::min<std::int64_t>(threads, n));
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Run fn(begin, end) over a fixed partition of [0, n) into `threads` contiguous
// chunks. The partition depends only on (n, threads), so per-index outputs are
// reproducible; useful when each chunk amortizes setup (solver plans, buffers).
inline void parallel_chunks(std::int64_t n, int threads,
                            const std::function<void(std::int64_t, std::int64_t)>& fn) {
  threads = effective_threads(threads);
  const int nc = static_cast<int>(std::min<std::int64_t>(threads, std::max<std::int64_t>(n, 1)));
  if (nc <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    const std::int64_t begin = n * c / nc;
    const std::int64_t end = n * (c + 1) / nc;
    pool.emplace_back([&fn, begin, end]() { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

// Deterministic pairwise sum over a fixed-order buffer.
inline double pairwise_sum(const double* data, std::int64_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::int64_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace ampcrit
