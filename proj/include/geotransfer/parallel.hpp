#pragma once

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace geotransfer {

// Runs fn(i) for i in [0, n). Each invocation must write only to its own
// output slot; the parallel path is then bit-identical to the serial one.
template <typename Fn>
void run_indexed(std::size_t n, bool parallel, Fn&& fn) {
#if defined(_OPENMP)
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < n; ++i) {
    fn(i);
  }
}

inline bool openmp_enabled() {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

}  // namespace geotransfer
