#include "qmri/signal_model.hpp"

namespace qmri {

kernels::ModelView model_view(const ParameterState& x, const AcquisitionProtocol& protocol) {
  return {protocol.kind, protocol.times_ms, x.mx(), x.my(), x.r()};
}

SignalImages model_forward(const ParameterState& x, const AcquisitionProtocol& protocol) {
  if (!x.all_finite()) throw DomainError("model_forward: non-finite parameter state");
  SignalImages s(protocol.contrasts(), x.grid());
  kernels::omp::model_forward(model_view(x, protocol), s.images.values());
  return s;
}

ParameterState model_jacobian_adjoint(const ParameterState& x, const AcquisitionProtocol& protocol,
                                      const SignalImages& resid) {
  if (!x.all_finite()) throw DomainError("model_jacobian_adjoint: non-finite parameter state");
  if (resid.contrasts() != protocol.contrasts()) throw ShapeError("residual contrast count does not match protocol");
  check_same_grid(resid.grid(), x.grid(), "model_jacobian_adjoint");
  ParameterState g(x.grid());
  kernels::omp::model_jacobian_adjoint(model_view(x, protocol), resid.images.values(), g.mx(), g.my(), g.r());
  return g;
}

}  // namespace qmri
