#pragma once

#include <array>
#include <optional>

#include "qmri/types.hpp"

namespace qmri {

/// Acquired data and the encoding it was acquired with. `y` is expected to be
/// zero off the mask (see Measurement::masked).
struct Measurement {
  KSpaceData y;
  AcquisitionProtocol protocol;
  CoilMaps coils;
  SamplingMask mask;

  static Measurement masked(KSpaceData y, AcquisitionProtocol protocol, CoilMaps coils, SamplingMask mask);

  Grid grid() const { return y.grid(); }
  void validate() const;
};

/// Positive per-channel weights (Mx, My, R).
struct ChannelScaling {
  std::array<double, kChannels> w{1.0, 1.0, 1.0};

  double operator[](Channel c) const { return w[static_cast<std::size_t>(c)]; }
  ParameterState scale(const ParameterState& x) const;
  ParameterState unscale(const ParameterState& u) const;
  void validate() const;
};

struct ObjectiveConfig {
  double lambda = 0.0;
  std::optional<ParameterState> prior;  // z; required when lambda > 0
  double r_max = 1.0;                   // 1/ms
  ChannelScaling scaling;               // weights of the prior term

  void validate(Grid grid) const;
};

/// ||P F C M(x) - y||^2 + lambda * sum_ch w_ch^2 ||x_ch - z_ch||^2
double objective(const ParameterState& x, const Measurement& m, const ObjectiveConfig& cfg);

/// 2 Re(J^H A^H (A M(x) - y)) + 2 lambda W^2 (x - z)
ParameterState gradient(const ParameterState& x, const Measurement& m, const ObjectiveConfig& cfg);

struct Evaluation {
  double value = 0.0;
  double data_term = 0.0;
  KSpaceData residual;  // A M(x) - y
};

Evaluation evaluate(const ParameterState& x, const Measurement& m, const ObjectiveConfig& cfg);
ParameterState gradient_at(const ParameterState& x, const Evaluation& e, const Measurement& m,
                           const ObjectiveConfig& cfg);

/// Clamps R to [0, r_max].
void project_rate(ParameterState& x, double r_max);

}  // namespace qmri
