#pragma once

// Replica execution. Every estimator in the toolkit is a map over independent
// replicas (environment seed r, walk seed r) followed by a reduction in
// replica-index order, so the parallel kernel and the serial reference produce
// bit-identical results for any worker count.

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace rwre {

/// Serial reference: out[r] = f(r) for r = 0..n-1.
template <class T, class F>
std::vector<T> map_replicas_serial(std::size_t n, F&& f) {
    std::vector<T> out(n);
    for (std::size_t r = 0; r < n; ++r) out[r] = f(r);
    return out;
}

/// OpenMP kernel with the same contract as map_replicas_serial. Exceptions
/// thrown by f are rethrown on the calling thread (first one wins).
template <class T, class F>
std::vector<T> map_replicas(std::size_t n, int workers, F&& f) {
    if (workers <= 1) return map_replicas_serial<T>(n, f);
    std::vector<T> out(n);
    std::exception_ptr error;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long long r = 0; r < count; ++r) {
        try {
            out[static_cast<std::size_t>(r)] = f(static_cast<std::size_t>(r));
        } catch (...) {
#pragma omp critical(rwre_replica_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

inline int hardware_workers() { return omp_get_max_threads(); }

}  // namespace rwre
