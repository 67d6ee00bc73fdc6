#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ccpinn::parallel {

/// Runtime switch for the OpenMP code paths. Kernels consult this so the
/// serial reference behaviour is reachable without a rebuild.
bool enabled();
void set_enabled(bool on);

int max_threads();
void set_threads(int n);

}  // namespace ccpinn::parallel
