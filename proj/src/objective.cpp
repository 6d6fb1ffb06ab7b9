#include "qmri/objective.hpp"

#include <algorithm>
#include <cmath>

#include "qmri/encoding.hpp"
#include "qmri/kernels.hpp"
#include "qmri/signal_model.hpp"

namespace qmri {

Measurement Measurement::masked(KSpaceData y, AcquisitionProtocol protocol, CoilMaps coils, SamplingMask mask) {
  Measurement m{apply_mask(std::move(y), mask), std::move(protocol), std::move(coils), std::move(mask)};
  m.validate();
  return m;
}

void Measurement::validate() const {
  if (y.contrasts() != protocol.contrasts()) {
    throw ShapeError("k-space has " + std::to_string(y.contrasts()) + " contrasts but protocol has " +
                     std::to_string(protocol.contrasts()));
  }
  if (y.coils() != coils.coils()) throw ShapeError("k-space coil count does not match coil maps");
  if (mask.contrasts() != y.contrasts()) throw ShapeError("mask contrast count does not match k-space");
  check_same_grid(coils.grid(), y.grid(), "coil maps");
  check_same_grid(mask.grid(), y.grid(), "mask");
  validate_mask(mask);
}

ParameterState ChannelScaling::scale(const ParameterState& x) const {
  ParameterState u = x;
  for (std::size_t c = 0; c < kChannels; ++c)
    for (double& v : u.channel(static_cast<Channel>(c))) v *= w[c];
  return u;
}

ParameterState ChannelScaling::unscale(const ParameterState& u) const {
  ParameterState x = u;
  for (std::size_t c = 0; c < kChannels; ++c)
    for (double& v : x.channel(static_cast<Channel>(c))) v /= w[c];
  return x;
}

void ChannelScaling::validate() const {
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("channel scales must be positive and finite");
  }
}

void ObjectiveConfig::validate(Grid grid) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(r_max > 0.0)) throw ConfigError("r_max must be positive");
  scaling.validate();
  if (lambda > 0.0 && !prior) throw ConfigError("lambda > 0 requires a prior z");
  if (prior && prior->grid() != grid) throw ShapeError("prior z grid does not match x");
}

namespace {

double prior_term(const ParameterState& x, const ObjectiveConfig& cfg) {
  if (cfg.lambda == 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto ch = static_cast<Channel>(c);
    auto xs = x.channel(ch);
    auto zs = cfg.prior->channel(ch);
    double s = 0.0;
    for (std::size_t v = 0; v < xs.size(); ++v) {
      const double d = xs[v] - zs[v];
      s += d * d;
    }
    total += cfg.scaling.w[c] * cfg.scaling.w[c] * s;
  }
  return cfg.lambda * total;
}

}  // namespace

Evaluation evaluate(const ParameterState& x, const Measurement& m, const ObjectiveConfig& cfg) {
  cfg.validate(x.grid());
  check_same_grid(x.grid(), m.grid(), "objective");
  Evaluation e;
  e.residual = encode(x, m.protocol, m.coils, m.mask);
  kernels::omp::subtract(e.residual.samples.values(), m.y.samples.values(), e.residual.samples.values());
  e.data_term = kernels::omp::squared_norm(std::span<const cplx>(e.residual.samples.values()));
  e.value = e.data_term + prior_term(x, cfg);
  return e;
}

ParameterState gradient_at(const ParameterState& x, const Evaluation& e, const Measurement& m,
                           const ObjectiveConfig& cfg) {
  const SignalImages back = encode_adjoint_linear(e.residual, m.coils, m.mask);
  ParameterState g = model_jacobian_adjoint(x, m.protocol, back);
  if (cfg.lambda > 0.0) {
    for (std::size_t c = 0; c < kChannels; ++c) {
      const auto ch = static_cast<Channel>(c);
      const double k = 2.0 * cfg.lambda * cfg.scaling.w[c] * cfg.scaling.w[c];
      auto gs = g.channel(ch);
      auto xs = x.channel(ch);
      auto zs = cfg.prior->channel(ch);
      for (std::size_t v = 0; v < gs.size(); ++v) gs[v] += k * (xs[v] - zs[v]);
    }
  }
  return g;
}

double objective(const ParameterState& x, const Measurement& m, const ObjectiveConfig& cfg) {
  return evaluate(x, m, cfg).value;
}

ParameterState gradient(const ParameterState& x, const Measurement& m, const ObjectiveConfig& cfg) {
  return gradient_at(x, evaluate(x, m, cfg), m, cfg);
}

void project_rate(ParameterState& x, double r_max) {
  for (double& v : x.r()) v = std::clamp(v, 0.0, r_max);
}

}  // namespace qmri
