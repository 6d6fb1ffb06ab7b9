#include "qmri/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace qmri {

void set_num_threads(int n) { omp_set_num_threads(n > 0 ? n : omp_get_num_procs()); }

int num_threads() { return omp_get_max_threads(); }

int threads_from_env() {
  const char* s = std::getenv("QMRI_THREADS");
  if (!s) return 0;
  try {
    const int n = std::stoi(s);
    return n > 0 ? n : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace qmri
