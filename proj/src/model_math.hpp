#pragma once

// Per-voxel signal-model arithmetic shared by the serial and OpenMP kernels.

#include <cmath>

#include "qmri/kernels.hpp"

namespace qmri::kernels::detail {

// Signal factor f(t, r) and its derivative in r.
struct Factor {
  double value;
  double d_rate;
};

inline Factor signal_factor(MappingKind kind, double t, double r) {
  const double e = std::exp(-t * r);
  if (kind == MappingKind::T2) return {e, -t * e};
  return {1.0 - 2.0 * e, 2.0 * t * e};
}

inline void forward_voxel(const ModelView& x, std::size_t v, std::size_t voxels, cplx* out) {
  const cplx m{x.mx[v], x.my[v]};
  for (std::size_t k = 0; k < x.times.size(); ++k) {
    out[k * voxels + v] = m * signal_factor(x.kind, x.times[k], x.r[v]).value;
  }
}

inline void adjoint_voxel(const ModelView& x, std::size_t v, std::size_t voxels, const cplx* resid, double& gmx,
                          double& gmy, double& gr) {
  const cplx m{x.mx[v], x.my[v]};
  double ax = 0.0, ay = 0.0, ar = 0.0;
  for (std::size_t k = 0; k < x.times.size(); ++k) {
    const cplx res = resid[k * voxels + v];
    const Factor f = signal_factor(x.kind, x.times[k], x.r[v]);
    ax += f.value * res.real();
    ay += f.value * res.imag();
    ar += f.d_rate * (m.real() * res.real() + m.imag() * res.imag());
  }
  gmx = 2.0 * ax;
  gmy = 2.0 * ay;
  gr = 2.0 * ar;
}

inline constexpr std::size_t kReductionBlock = 4096;

}  // namespace qmri::kernels::detail
