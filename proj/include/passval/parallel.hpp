#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace passval {

// Static chunking over [0, n). Bodies must write only to their own index's
// slot; results then do not depend on the thread count.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned t = static_cast<unsigned>(
      std::min<std::size_t>(threads, n));
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / t;
      const std::size_t hi = n * (w + 1) / t;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace passval
