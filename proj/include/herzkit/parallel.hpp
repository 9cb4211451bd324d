#pragma once

#include <cstddef>
#include <utility>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace herzkit {

// Thread count used by the OpenMP kernels. 1 selects the serial reference
// path; tests rely on serial and parallel runs being bit-identical, which
// holds because every kernel writes independent slots and reductions are
// performed afterwards in a fixed order.
int worker_threads();
void set_worker_threads(int n);

namespace detail {
inline int& thread_count_ref() {
    static int n = 1;
    return n;
}
}  // namespace detail

inline int worker_threads() { return detail::thread_count_ref(); }

inline void set_worker_threads(int n) { detail::thread_count_ref() = n < 1 ? 1 : n; }

// Data-parallel sweep over [0, count). fn(i) must only touch state owned by
// index i.
template <typename F>
void parallel_for(std::size_t count, F&& fn) {
#if defined(_OPENMP)
    const int nt = worker_threads();
    if (nt > 1 && count > 1) {
#pragma omp parallel for schedule(static) num_threads(nt)
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

// Serial reference sweep, kept separate so tests and the benchmark can pin
// the comparison path explicitly.
template <typename F>
void serial_for(std::size_t count, F&& fn) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace herzkit
