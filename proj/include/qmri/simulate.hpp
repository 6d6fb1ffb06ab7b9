#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmri/types.hpp"

namespace qmri {

/// Ellipse in grid-normalized coordinates, x and y in [-1, 1].
struct Ellipse {
  double cx = 0.0, cy = 0.0;
  double ax = 0.5, ay = 0.5;  // half-axes
  double rotation_deg = 0.0;
  cplx magnetization{1.0, 0.0};
  double t_ms = 100.0;  // T1 or T2 depending on the phantom kind
};

struct PhantomSpec {
  Grid grid;
  MappingKind kind = MappingKind::T2;
  std::vector<Ellipse> ellipses;
  double background_t_ms = 0.0;  // 0: R = 0 outside every ellipse

  void validate() const;
};

struct Phantom {
  ParameterState truth;
  BoolArray tissue;  // (n_ellipse, ny, nx): voxels where ellipse i is the topmost
};

/// Later ellipses overwrite earlier ones.
Phantom make_phantom(const PhantomSpec& spec);

/// Gaussian-lobe sensitivities around the FOV with linear phase, normalized
/// to unit sum-of-squares at every voxel.
CoilMaps make_coil_maps(std::size_t n_coil, Grid grid);

enum class MaskScheme { equispaced, uniform_random };

std::string to_string(MaskScheme s);
MaskScheme parse_mask_scheme(const std::string& s);

struct MaskSpec {
  std::size_t accel = 4;
  std::size_t acs_width = 0;
  MaskScheme scheme = MaskScheme::equispaced;
  std::uint64_t seed = 0;
  bool per_contrast = false;

  void validate(Grid grid) const;
};

/// Phase-encode (ky) undersampling, kx fully sampled, plus a centered ACS block.
SamplingMask make_mask(const MaskSpec& spec, Grid grid, std::size_t n_contrast);

/// First line of the centered ACS block of `width` lines.
std::size_t acs_start(std::size_t ny, std::size_t width);

/// ky lines with at least one sample in the given contrast.
std::size_t sampled_lines(const SamplingMask& p, std::size_t contrast);

/// ny / sampled lines for the given contrast.
double net_acceleration(const SamplingMask& p, std::size_t contrast = 0);

/// Fully sampled k-space, encode(x) plus i.i.d. complex Gaussian noise of
/// standard deviation `noise_sigma` per real and imaginary component.
KSpaceData simulate_kspace(const ParameterState& x_true, const AcquisitionProtocol& protocol, const CoilMaps& c,
                           double noise_sigma, std::uint64_t rng_seed);

/// Per-component sigma giving 20 log10(rms(signal) / rms(noise)) = snr_db.
double noise_sigma_for_snr(const KSpaceData& clean, double snr_db);

struct MaskSplit {
  SamplingMask train;  // Theta: DC samples, always includes ACS
  SamplingMask loss;   // Lambda: held-out samples, never ACS
};

/// Per contrast, moves a uniformly random rho-fraction of the sampled
/// non-ACS points into the loss mask.
MaskSplit split_mask(const SamplingMask& p, std::size_t acs_width, double rho, std::uint64_t seed);

}  // namespace qmri
