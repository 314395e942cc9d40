// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SNAPDDM_PARALLEL_HPP
#define SNAPDDM_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace snapddm {

// Task-pool width: SNAPDDM_THREADS env var, else hardware concurrency.
inline int thread_count() {
  static int n = [] {
    if (const char* env = std::getenv("SNAPDDM_THREADS")) {
      int k = std::atoi(env);
      if (k > 0) return k;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
  }();
  return n;
}

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker slot, so any per-chunk state is indexed deterministically regardless
// of scheduling. fn must write only to disjoint slots.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  int workers = thread_count();
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

// Deterministic chunked reduction: runs fn(i, slot) where slot identifies the
// chunk; the caller reduces the per-slot accumulators in slot order.
inline int parallel_chunks(size_t n) {
  int workers = thread_count();
  if (n == 0) return 0;
  size_t chunk = (n + workers - 1) / workers;
  return int((n + chunk - 1) / chunk);
}

inline void parallel_for_chunked(size_t n, const std::function<void(size_t, int)>& fn) {
  int workers = thread_count();
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> threads;
  int slot = 0;
  for (int w = 0; w < workers; ++w) {
    size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    int s = slot++;
    threads.emplace_back([lo, hi, s, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i, s);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace snapddm

#endif  // SNAPDDM_PARALLEL_HPP
