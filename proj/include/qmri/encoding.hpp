#pragma once

#include "qmri/types.hpp"

namespace qmri {

// Linear encoding A = P F C and its adjoint. Masks are shared across coils
// and may differ per contrast.

/// out[k, j] = c[j] * s[k], shape (n_contrast, n_coil, ny, nx).
KSpaceData apply_coils(const SignalImages& s, const CoilMaps& c);

KSpaceData apply_mask(KSpaceData k, const SamplingMask& p);

/// A s = P F C s.
KSpaceData encode_linear(const SignalImages& s, const CoilMaps& c, const SamplingMask& p);

/// A^H k = sum_j conj(c_j) F^-1 P k_j.
SignalImages encode_adjoint_linear(const KSpaceData& k, const CoilMaps& c, const SamplingMask& p);

/// P F C M(x).
KSpaceData encode(const ParameterState& x, const AcquisitionProtocol& protocol, const CoilMaps& c,
                  const SamplingMask& p);

}  // namespace qmri
