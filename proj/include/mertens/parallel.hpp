#pragma once

#include <cstdint>

#ifdef MERTENS_HAVE_OPENMP
#include <omp.h>
#endif

namespace mertens {

// 0 restores the runtime default (all hardware threads).
void set_worker_count(unsigned workers);
unsigned worker_count();

// Runs fn(i) for i in [0, n). Iterations must write disjoint state; results do
// not depend on the worker count.
template <class Fn>
void parallel_for(std::uint64_t n, Fn&& fn, bool dynamic = false) {
#ifdef MERTENS_HAVE_OPENMP
    const int threads = static_cast<int>(worker_count());
    if (n > 1 && threads > 1) {
        const auto count = static_cast<long long>(n);
        if (dynamic) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
            for (long long i = 0; i < count; ++i) fn(static_cast<std::uint64_t>(i));
        } else {
#pragma omp parallel for schedule(static) num_threads(threads)
            for (long long i = 0; i < count; ++i) fn(static_cast<std::uint64_t>(i));
        }
        return;
    }
#endif
    (void)dynamic;
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace mertens
