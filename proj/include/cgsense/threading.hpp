#pragma once

#include <thread>
#include <vector>

#include "cgsense/array.hpp"

namespace cgsense {

// Static partition of [0, n) over at most n_threads workers. Work items must
// write to disjoint state; the partition (not the worker count) defines the
// result, so outputs are identical for any thread count.
template <class Fn>
void parallel_for(index_t n, int n_threads, Fn&& fn) {
  if (n <= 0) return;
  int workers = n_threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : n_threads;
  if (workers < 1) workers = 1;
  if (workers > n) workers = static_cast<int>(n);
  if (workers == 1) {
    for (index_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    index_t lo = n * w / workers;
    index_t hi = n * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (index_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace cgsense
