#pragma once

#include <optional>
#include <vector>

#include "qmri/nlcg.hpp"
#include "qmri/objective.hpp"
#include "qmri/regularizer.hpp"

namespace qmri {

struct UnrollConfig {
  int n_blocks = 3;
  int dc_iters = 20;
  int init_iters = 800;
  double lambda = 0.05;  // weight of the prior term, in scaled units
  double r_max = 1.0;
  std::optional<ChannelScaling> scaling;  // unset: auto_scaling of the initial estimate
  bool scaled_solver = true;              // run NLCG in channel-scaled coordinates
  NlcgConfig nlcg;                        // line-search settings; max_iters is set per stage

  void validate() const;
};

/// w_ch = 1 / max(p95 |x_ch|, 1e-12); an identically zero channel gets 1.
ChannelScaling auto_scaling(const ParameterState& x);

struct InitResult {
  ParameterState x;
  NlcgReport report;
};

/// Zero-filled pixelwise seed refined by init_iters unregularized NLCG iterations.
/// `solver_scaling` is used only when cfg.scaled_solver is set.
InitResult initialize(const Measurement& m, const UnrollConfig& cfg,
                      const std::optional<ChannelScaling>& solver_scaling = std::nullopt);

struct UnrollResult {
  ParameterState x;
  ChannelScaling scaling;
  NlcgReport init_report;
  std::vector<NlcgReport> block_reports;
};

/// Initialization, then per block: z = unscale(R(scale(x))) followed by
/// dc_iters of NLCG on the prior-weighted objective, warm-started from x.
UnrollResult run_unrolled(const Measurement& m, const UnrollConfig& cfg, Regularizer& reg);

}  // namespace qmri
