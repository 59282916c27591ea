#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roofpedia::parallel {

inline int max_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(i) for i in [0, n) on `workers` OpenMP threads (<= 0 means the OpenMP default).
/// Iterations must write disjoint state. The first exception, by index, is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, int workers, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    const int threads = workers > 0 ? workers : max_workers();
    const auto count = static_cast<long long>(n);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace roofpedia::parallel
