#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qotto {

/// 0 means "one worker per hardware thread".
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0)
    return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for every i in [0, n_tasks) on up to `workers` threads.
/// Tasks must write only to their own output slot; results are then
/// independent of scheduling. The first exception thrown by a task is
/// rethrown on the calling thread.
template <class Task>
void parallel_for(std::size_t n_tasks, unsigned workers, Task&& task) {
  const std::size_t n_threads =
      std::min<std::size_t>(resolve_workers(workers), n_tasks);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i)
      task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(n_tasks);
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(n_threads - 1);
  for (std::size_t t = 1; t < n_threads; ++t)
    pool.emplace_back(body);
  body();
  pool.clear();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace qotto
