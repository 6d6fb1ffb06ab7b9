#include "qmri/unroll.hpp"

#include <cmath>

#include "qmri/baselines.hpp"
#include "qmri/metrics.hpp"

namespace qmri {

void UnrollConfig::validate() const {
  if (n_blocks < 1) throw ConfigError("n_blocks must be >= 1");
  if (dc_iters < 1) throw ConfigError("dc_iters must be >= 1");
  if (init_iters < 0) throw ConfigError("init_iters must be >= 0");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(r_max > 0.0)) throw ConfigError("r_max must be positive");
  if (scaling) scaling->validate();
  nlcg.validate();
}

ChannelScaling auto_scaling(const ParameterState& x) {
  constexpr double kEps = 1e-12;
  ChannelScaling s;
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto ch = x.channel(static_cast<Channel>(c));
    const bool all_zero = std::all_of(ch.begin(), ch.end(), [](double v) { return v == 0.0; });
    s.w[c] = all_zero ? 1.0 : 1.0 / std::max(percentile_abs(ch, 0.95), kEps);
  }
  return s;
}

InitResult initialize(const Measurement& m, const UnrollConfig& cfg, const std::optional<ChannelScaling>& solver_scaling) {
  cfg.validate();
  ParameterState seed = seed_from_zero_filled(m, cfg.r_max);
  if (cfg.init_iters == 0) return {std::move(seed), {}};
  ObjectiveConfig obj;
  obj.r_max = cfg.r_max;
  NlcgConfig nl = cfg.nlcg;
  nl.max_iters = cfg.init_iters;
  if (cfg.scaled_solver) nl.variable_scaling = solver_scaling ? *solver_scaling : auto_scaling(seed);
  auto [x, report] = nlcg_minimize(std::move(seed), m, obj, nl);
  return {std::move(x), std::move(report)};
}

UnrollResult run_unrolled(const Measurement& m, const UnrollConfig& cfg, Regularizer& reg) {
  cfg.validate();
  UnrollResult out;
  InitResult init = initialize(m, cfg, cfg.scaling);
  out.x = std::move(init.x);
  out.init_report = std::move(init.report);
  out.scaling = cfg.scaling ? *cfg.scaling : auto_scaling(out.x);

  const RegularizerContext ctx{m.protocol.kind, out.scaling};
  ObjectiveConfig obj;
  obj.lambda = cfg.lambda;
  obj.r_max = cfg.r_max;
  obj.scaling = out.scaling;
  NlcgConfig nl = cfg.nlcg;
  nl.max_iters = cfg.dc_iters;
  if (cfg.scaled_solver) nl.variable_scaling = out.scaling;

  for (int block = 0; block < cfg.n_blocks; ++block) {
    ParameterState z;
    try {
      z = out.scaling.unscale(reg.apply(out.scaling.scale(out.x), ctx));
    } catch (const BridgeError& e) {
      throw BridgeError("unroll block " + std::to_string(block) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("unroll block " + std::to_string(block) + ": " + e.what());
    }
    if (z.grid() != out.x.grid() || !z.all_finite()) {
      throw Error("unroll block " + std::to_string(block) + ": regularizer returned an invalid state");
    }
    obj.prior = std::move(z);
    auto [x, report] = nlcg_minimize(std::move(out.x), m, obj, nl);
    out.x = std::move(x);
    out.block_reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace qmri
