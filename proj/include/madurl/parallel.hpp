#pragma once

#include <atomic>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace madurl {

// Global switch between the OpenMP path and the serial reference path.
// Every kernel in this codebase is written so both paths produce bit-identical
// results; tests and the bench tool flip this to compare them.
namespace threading {

inline std::atomic<bool>& enabled_flag() {
    static std::atomic<bool> flag{true};
    return flag;
}

inline bool enabled() { return enabled_flag().load(std::memory_order_relaxed); }
inline void set_enabled(bool on) { enabled_flag().store(on, std::memory_order_relaxed); }

// RAII scope for tests: force serial (or parallel) within a block.
struct Scope {
    explicit Scope(bool on) : prev_(enabled()) { set_enabled(on); }
    ~Scope() { set_enabled(prev_); }
  private:
    bool prev_;
};

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace threading

// Data-parallel loop over [0, n). The body must only write state owned by
// iteration i; iteration order must not matter. With threading disabled (or
// without OpenMP) this is the plain serial loop.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    if (threading::enabled()) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(static_cast<std::size_t>(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace madurl
