#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "hedgedim/real.hpp"

namespace hedgedim {

// Runs fn(i) for i in [0, n) on up to `threads` workers with contiguous
// chunks. Workers inherit the caller's working precision. The first
// exception thrown by any worker is rethrown after all have joined.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::size_t t = std::max(1, threads);
  if (t > n) t = std::max<std::size_t>(1, n);
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  mpfr_prec_t bits = Precision::bits();
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  std::size_t chunk = (n + t - 1) / t;
  for (std::size_t k = 0; k < t; ++k) {
    std::size_t lo = k * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      PrecisionScope scope(bits);
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace hedgedim
