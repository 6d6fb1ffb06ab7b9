#pragma once

#include <vector>

#include "qmri/objective.hpp"
#include "qmri/types.hpp"

namespace qmri {

/// Coil-combined inverse FFT of the masked data, divided by max(sum |c|^2, 1e-12).
SignalImages zero_filled_recon(const KSpaceData& y, const CoilMaps& c, const SamplingMask& p);

struct CgSenseResult {
  SignalImages images;
  // ||A s_i - y|| per contrast, starting with the zero initial guess.
  std::vector<std::vector<double>> residual_norms;
};

/// Per-contrast CGLS on min_s ||P F C s - y||^2. Stops after `iters` or when
/// the normal-equation residual falls below tol times its initial value.
CgSenseResult cg_sense_recon(const KSpaceData& y, const CoilMaps& c, const SamplingMask& p, int iters,
                             double tol = 1e-10);

/// Voxelwise fit of the signal model to reconstructed images.
/// T2: log-linear least squares weighted by |s|^2, phase from the first echo.
/// T1: 64-point rate grid refined by golden-section search, magnetization in
/// closed form at each rate.
/// Voxels whose peak magnitude is below 1e-3 of the image's 95th-percentile
/// peak magnitude are returned as zero.
ParameterState pixelwise_fit(const SignalImages& s, const AcquisitionProtocol& protocol, double r_max = 1.0);

/// pixelwise_fit(zero_filled_recon(y, c, p)) with R clamped to [0, r_max].
ParameterState seed_from_zero_filled(const Measurement& m, double r_max = 1.0);

}  // namespace qmri
