#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace biphoton {

/// True when the build has OpenMP and more than one thread is available.
inline bool parallel_available() {
#ifdef _OPENMP
    return omp_get_max_threads() > 1;
#else
    return false;
#endif
}

/// Index loop over [0, n). Each iteration must write only to its own slot of
/// a preallocated output, so results are identical for any thread count.
/// Reductions stay with the caller and run serially.
template <class Body>
void parallel_for(std::size_t n, bool parallel, Body&& body) {
#ifdef _OPENMP
    if (parallel && n > 1) {
        const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
        for (long long i = 0; i < count; ++i)
            body(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace biphoton
