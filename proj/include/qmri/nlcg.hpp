#pragma once

#include <optional>
#include <vector>

#include "qmri/objective.hpp"

namespace qmri {

struct NlcgConfig {
  int max_iters = 100;
  double grad_tol = 1e-9;  // relative to the initial gradient norm
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 40;
  double initial_step = 1.0;  // first trial moves this far along the normalized direction
  // later trials start at growth * alpha_prev * <g,d>_prev / <g,d>
  double step_growth = 2.0;
  // Solve in u = W x. Unset means W = I.
  std::optional<ChannelScaling> variable_scaling;

  void validate() const;
};

struct NlcgReport {
  std::vector<double> objective_trace;  // f(x0) followed by one value per accepted step
  double final_grad_norm = 0.0;
  int iterations_run = 0;
  int backtrack_failures = 0;
  int restarts = 0;  // steepest-descent resets forced by <d, g> >= 0
  bool converged = false;
};

struct NlcgResult {
  ParameterState x;
  NlcgReport report;
};

/// Polak-Ribiere+ nonlinear conjugate gradient with Armijo backtracking.
/// R is clamped to [0, r_max] after every accepted step.
NlcgResult nlcg_minimize(ParameterState x0, const Measurement& m, const ObjectiveConfig& obj,
                         const NlcgConfig& cfg);

}  // namespace qmri
