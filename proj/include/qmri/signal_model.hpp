#pragma once

#include "qmri/kernels.hpp"
#include "qmri/types.hpp"

namespace qmri {

/// Mono-exponential signal per voxel and contrast k, with m = Mx + i My:
///   T2: s_k = m exp(-TE_k R)
///   T1: s_k = m (1 - 2 exp(-TI_k R))
SignalImages model_forward(const ParameterState& x, const AcquisitionProtocol& protocol);

/// Per-voxel 2 Re(J^H resid) as a (gMx, gMy, gR) triple. When `resid` is the
/// back-projected k-space residual this is the gradient of the data term.
ParameterState model_jacobian_adjoint(const ParameterState& x, const AcquisitionProtocol& protocol,
                                      const SignalImages& resid);

kernels::ModelView model_view(const ParameterState& x, const AcquisitionProtocol& protocol);

}  // namespace qmri
