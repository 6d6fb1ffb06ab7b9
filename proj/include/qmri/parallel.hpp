#pragma once

namespace qmri {

// Sets the OpenMP team size used by the parallel kernels. n <= 0 selects
// all available cores.
void set_num_threads(int n);
int num_threads();

// Thread count from QMRI_THREADS, or 0 when unset/invalid.
int threads_from_env();

}  // namespace qmri
