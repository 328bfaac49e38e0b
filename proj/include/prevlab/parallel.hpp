#ifndef PREVLAB_PARALLEL_HPP
#define PREVLAB_PARALLEL_HPP

#include <cstdint>
#include <thread>
#include <vector>

namespace prevlab {

// Runs fn(i) for i in [0, n). Each index writes only to its own output slot,
// so the result is identical for every worker count; aggregation happens
// afterwards in index order.
template <class Fn>
void parallel_for(std::int64_t n, int workers, Fn&& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  int w = workers;
  if (std::int64_t(w) > n) w = static_cast<int>(n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(w));
  for (int t = 0; t < w; ++t) {
    std::int64_t lo = n * t / w;
    std::int64_t hi = n * (t + 1) / w;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace prevlab

#endif
