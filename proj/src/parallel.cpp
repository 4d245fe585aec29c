#include "suno/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace suno {

namespace {
std::atomic<int> g_threads{0};
thread_local bool t_in_worker = false;
} // namespace

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
  int n = g_threads.load();
  if (n == 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body) {
  if (n == 0) return;
  const std::size_t workers =
      t_in_worker ? 1 : std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  auto run_chunk = [&](std::size_t w) {
    t_in_worker = true;
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    try {
      for (std::size_t i = lo; i < hi && !failed.load(std::memory_order_relaxed); ++i) body(i);
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
    t_in_worker = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
  run_chunk(0);
  for (auto &t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace suno
