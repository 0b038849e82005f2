#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef BABAGRID_HAVE_OPENMP
#include <omp.h>
#endif

namespace babagrid {

inline int default_jobs() {
#ifdef BABAGRID_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Serial reference loop. Kept as the baseline the parallel loop is tested and
// benchmarked against.
template <class Body>
void serial_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// Runs body(i) for i in [0, n). Iterations must be independent; results are
// written by index, so output order never depends on scheduling. The first
// exception (lowest index) is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
#ifdef BABAGRID_HAVE_OPENMP
  if (jobs > 1 && n > 1) {
    std::vector<std::exception_ptr> errors(n);
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    return;
  }
#endif
  (void)jobs;
  serial_for(n, body);
}

}  // namespace babagrid
