#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace traceinv {

/// Number of worker threads used by default; 0 means "all hardware threads".
inline std::size_t& default_thread_count() {
  static std::size_t count = 0;
  return count;
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested == 0) requested = default_thread_count();
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

/// Calls body(i) for i in [0, count). Work items are handed out dynamically,
/// so body must write its result into slot i and callers reduce afterwards in
/// index order; that keeps the outcome independent of the thread count.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t threads = 0) {
  threads = std::min(resolve_threads(threads), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace traceinv
