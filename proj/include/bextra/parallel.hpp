#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace bextra {

/// Runs fn(i) for i in [0, n) across at most `threads` workers. The range is
/// split into contiguous chunks so the work distribution — and therefore any
/// floating-point reduction done per index — is independent of thread count.
/// The first exception thrown by a worker is rethrown on the caller.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  const int base = n / workers;
  const int extra = n % workers;
  int start = 0;
  for (int w = 0; w < workers; ++w) {
    const int lo = start;
    const int hi = lo + base + (w < extra ? 1 : 0);
    start = hi;
    pool.emplace_back([&fn, &errors, w, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bextra
