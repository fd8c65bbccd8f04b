#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace cqdd {

// Runs fn(i) for i in [0, count) across OpenMP threads. Each index must
// write only its own output slot; the result is then independent of the
// thread count. The first exception thrown by any index is rethrown on the
// calling thread after the loop.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

// Sets the worker count used by parallel_for. n <= 0 keeps the default.
void set_thread_count(int n);
int thread_count();

}  // namespace cqdd
