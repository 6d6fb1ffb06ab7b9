#include "qmri/nlcg.hpp"

#include <cmath>

#include "qmri/kernels.hpp"

namespace qmri {

namespace k = kernels::omp;

void NlcgConfig::validate() const {
  if (max_iters < 0) throw ConfigError("nlcg max_iters must be >= 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) throw ConfigError("backtrack_factor must be in (0, 1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must be in (0, 1)");
  if (max_backtracks < 1) throw ConfigError("max_backtracks must be >= 1");
  if (!(initial_step > 0.0)) throw ConfigError("initial_step must be positive");
  if (!(step_growth >= 1.0)) throw ConfigError("step_growth must be >= 1");
  if (!(grad_tol >= 0.0)) throw ConfigError("grad_tol must be >= 0");
  if (variable_scaling) variable_scaling->validate();
}

namespace {

// Diagonal metric W^-2 applied channel-wise; identity when no scaling is set.
class Metric {
 public:
  explicit Metric(const std::optional<ChannelScaling>& s) {
    if (s) {
      for (std::size_t c = 0; c < kChannels; ++c) inv_w2_[c] = 1.0 / (s->w[c] * s->w[c]);
    }
  }

  // out = W^-2 g
  void precondition(const ParameterState& g, ParameterState& out) const {
    for (std::size_t c = 0; c < kChannels; ++c) {
      const auto ch = static_cast<Channel>(c);
      auto gs = g.channel(ch);
      auto os = out.channel(ch);
      for (std::size_t v = 0; v < gs.size(); ++v) os[v] = inv_w2_[c] * gs[v];
    }
  }

  // ||W d||
  double step_norm(const ParameterState& d) const {
    double s = 0.0;
    for (std::size_t c = 0; c < kChannels; ++c)
      s += k::squared_norm(d.channel(static_cast<Channel>(c))) / inv_w2_[c];
    return std::sqrt(s);
  }

 private:
  std::array<double, kChannels> inv_w2_{1.0, 1.0, 1.0};
};

// Drops direction components that would push R through a bound it already sits on.
void mask_active_bounds(const ParameterState& x, ParameterState& d, double r_max) {
  const auto r = x.r();
  auto dr = d.r();
  for (std::size_t v = 0; v < r.size(); ++v)
    if ((r[v] <= 0.0 && dr[v] < 0.0) || (r[v] >= r_max && dr[v] > 0.0)) dr[v] = 0.0;
}

// <g, b - a>
double displacement_dot(const ParameterState& g, const ParameterState& a, const ParameterState& b) {
  const auto gs = g.packed(), as = a.packed(), bs = b.packed();
  double s = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) s += gs[i] * (bs[i] - as[i]);
  return s;
}

void require_finite(double f, const char* where) {
  if (!std::isfinite(f)) throw NumericalError(std::string("non-finite objective ") + where);
}

}  // namespace

NlcgResult nlcg_minimize(ParameterState x0, const Measurement& m, const ObjectiveConfig& obj, const NlcgConfig& cfg) {
  cfg.validate();
  obj.validate(x0.grid());
  if (!x0.all_finite()) throw NumericalError("nlcg: non-finite initial state");

  NlcgResult out{std::move(x0), {}};
  ParameterState& x = out.x;
  NlcgReport& rep = out.report;
  const Metric metric(cfg.variable_scaling);

  Evaluation eval = evaluate(x, m, obj);
  require_finite(eval.value, "at the initial state");
  ParameterState g = gradient_at(x, eval, m, obj);
  ParameterState h(x.grid());  // preconditioned gradient
  metric.precondition(g, h);
  double gh = k::dot(g.packed(), h.packed());
  if (!std::isfinite(gh)) throw NumericalError("nlcg: non-finite gradient at the initial state");
  rep.final_grad_norm = std::sqrt(gh);
  if (gh == 0.0) {
    rep.converged = true;
    return out;
  }

  const double g0_norm = std::sqrt(gh);
  double f = eval.value;
  rep.objective_trace.push_back(f);

  ParameterState d = h;
  for (double& v : d.packed()) v = -v;
  ParameterState g_new(x.grid()), h_new(x.grid());
  ParameterState trial(x.grid());
  double alpha_prev = 0.0, gd_prev = 0.0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (std::sqrt(gh) <= cfg.grad_tol * g0_norm) {
      rep.converged = true;
      break;
    }
    mask_active_bounds(x, d, obj.r_max);
    double gd = k::dot(g.packed(), d.packed());
    if (!(gd < 0.0)) {
      std::copy(h.packed().begin(), h.packed().end(), d.packed().begin());
      for (double& v : d.packed()) v = -v;
      mask_active_bounds(x, d, obj.r_max);
      gd = k::dot(g.packed(), d.packed());
      ++rep.restarts;
      if (!(gd < 0.0)) {
        // stationary on the feasible set
        rep.converged = true;
        break;
      }
    }

    double alpha = (it == 0 || alpha_prev == 0.0) ? cfg.initial_step / metric.step_norm(d)
                                                  : cfg.step_growth * alpha_prev * gd_prev / gd;
    bool accepted = false;
    Evaluation trial_eval;
    for (int b = 0; b < cfg.max_backtracks; ++b) {
      std::copy(x.packed().begin(), x.packed().end(), trial.packed().begin());
      k::axpy(alpha, d.packed(), trial.packed());
      project_rate(trial, obj.r_max);
      if (trial.all_finite()) {
        // sufficient decrease along the projected displacement, alpha*<g,d> when nothing clamps
        const double decrease = displacement_dot(g, x, trial);
        trial_eval = evaluate(trial, m, obj);
        if (decrease < 0.0 && std::isfinite(trial_eval.value) && trial_eval.value <= f + cfg.armijo_c * decrease) {
          accepted = true;
          break;
        }
      }
      alpha *= cfg.backtrack_factor;
    }
    if (!accepted) {
      ++rep.backtrack_failures;
      break;
    }

    std::swap(x, trial);
    f = trial_eval.value;
    rep.objective_trace.push_back(f);
    ++rep.iterations_run;

    g_new = gradient_at(x, trial_eval, m, obj);
    metric.precondition(g_new, h_new);
    const double gh_new = k::dot(g_new.packed(), h_new.packed());
    if (!std::isfinite(gh_new)) throw NumericalError("nlcg: non-finite gradient");
    // Polak-Ribiere+: <g+, W^-2 (g+ - g)> / <g, W^-2 g>
    const double beta = std::max(0.0, (gh_new - k::dot(h_new.packed(), g.packed())) / gh);

    for (std::size_t i = 0; i < d.packed().size(); ++i) d.packed()[i] = -h_new.packed()[i] + beta * d.packed()[i];
    std::swap(g, g_new);
    std::swap(h, h_new);
    gh = gh_new;
    alpha_prev = alpha;
    gd_prev = gd;
  }
  if (!rep.converged && std::sqrt(gh) <= cfg.grad_tol * g0_norm) rep.converged = true;
  rep.final_grad_norm = std::sqrt(gh);
  return out;
}

}  // namespace qmri
