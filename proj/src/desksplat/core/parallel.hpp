#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace desksplat {

// Static partition of [0, n) into n_threads contiguous chunks. The chunk ->
// thread assignment depends only on (n, n_threads), so any reduction that
// merges per-thread partials in thread order is reproducible at a fixed
// thread count.
inline void parallel_chunks(int n, int n_threads,
                            const std::function<void(int begin, int end, int thread_idx)>& fn) {
  n_threads = std::max(1, n_threads);
  if (n_threads == 1 || n <= 1) {
    fn(0, n, 0);
    return;
  }
  n_threads = std::min(n_threads, n);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    int begin = static_cast<int>(static_cast<long long>(n) * t / n_threads);
    int end = static_cast<int>(static_cast<long long>(n) * (t + 1) / n_threads);
    pool.emplace_back([=, &fn] { fn(begin, end, t); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace desksplat
