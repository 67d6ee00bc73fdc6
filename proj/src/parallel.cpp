#include "ccpinn/parallel.hpp"

#include <atomic>

namespace ccpinn::parallel {

namespace {
std::atomic<bool> g_enabled{true};
}

bool enabled() { return g_enabled.load(std::memory_order_relaxed); }

void set_enabled(bool on) { g_enabled.store(on, std::memory_order_relaxed); }

#ifdef _OPENMP

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

#else

int max_threads() { return 1; }

void set_threads(int) {}

#endif

}  // namespace ccpinn::parallel
