#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lense {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads, each thread taking a
/// contiguous block. Callers write results into per-index slots and reduce
/// afterwards in index order, so output does not depend on `jobs`.
template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  const std::size_t block = (n + jobs - 1) / jobs;
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      try {
        const std::size_t end = std::min(n, (j + 1) * block);
        for (std::size_t i = j * block; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lense
