#include "papml/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace papml {

namespace {
std::atomic<std::size_t> g_threads{0};

std::size_t effective_threads() {
  const std::size_t n = g_threads.load(std::memory_order_relaxed);
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}
}  // namespace

void set_thread_count(std::size_t n) { g_threads.store(n, std::memory_order_relaxed); }

std::size_t thread_count() { return effective_threads(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f,
                  std::size_t min_per_thread) {
  if (n == 0) return;
  const std::size_t grain = std::max<std::size_t>(1, min_per_thread);
  std::size_t workers = std::min(effective_threads(), n / grain);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }

  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::atomic<int> error_guard{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);

  auto run_chunk = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end && !failed.load(std::memory_order_relaxed); ++i) {
        f(i);
      }
    } catch (...) {
      if (error_guard.fetch_add(1) == 0) first_error = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  };

  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t begin = n * t / workers;
    const std::size_t end = n * (t + 1) / workers;
    pool.emplace_back(run_chunk, begin, end);
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace papml
