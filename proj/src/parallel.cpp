#include "mertens/parallel.hpp"

#include <atomic>
#include <thread>

namespace mertens {

namespace {
std::atomic<unsigned> configured_workers{0};
}

void set_worker_count(unsigned workers) { configured_workers = workers; }

unsigned worker_count() {
    unsigned w = configured_workers;
    if (w) return w;
#ifdef MERTENS_HAVE_OPENMP
    return static_cast<unsigned>(omp_get_max_threads());
#else
    return 1;
#endif
}

}  // namespace mertens
