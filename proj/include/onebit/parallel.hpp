#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace onebit {

// Worker count: ONEBIT_THREADS when set to a positive integer, otherwise the
// hardware concurrency.
inline unsigned default_threads()
{
  if (char const *env = std::getenv("ONEBIT_THREADS")) {
    try {
      int const n = std::stoi(env);
      if (n > 0) { return static_cast<unsigned>(n); }
    } catch (std::exception const &) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed dynamically, so fn must write its result to a slot keyed by i.
// The first exception thrown by any item is rethrown after all workers join.
template <typename Fn> void parallel_for(std::size_t count, unsigned threads, Fn &&fn)
{
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) { fn(i); }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) { error = std::current_exception(); }
            next = count;
          }
        }
      });
    }
  }
  if (error) { std::rethrow_exception(error); }
}

} // namespace onebit
