#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsint {

/// Runs body(i) for i in [0, n).  Work items must write to disjoint
/// outputs; the first exception thrown by any item is rethrown.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  std::exception_ptr error;
  std::mutex mu;
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : 1;
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
    }
  }
#else
  (void)threads;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
    }
  }
#endif
  if (error) std::rethrow_exception(error);
}

}  // namespace rsint
