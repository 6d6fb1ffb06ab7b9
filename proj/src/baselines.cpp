#include "qmri/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "qmri/encoding.hpp"
#include "qmri/fft.hpp"
#include "qmri/kernels.hpp"
#include "qmri/metrics.hpp"

namespace qmri {

namespace k = kernels::omp;

SignalImages zero_filled_recon(const KSpaceData& y, const CoilMaps& c, const SamplingMask& p) {
  SignalImages s = encode_adjoint_linear(y, c, p);
  const std::size_t n = c.grid().voxels();
  std::vector<double> inv(n);
  for (std::size_t v = 0; v < n; ++v) {
    double ss = 0.0;
    for (std::size_t j = 0; j < c.coils(); ++j) ss += std::norm(c.maps[j * n + v]);
    inv[v] = 1.0 / std::max(ss, 1e-12);
  }
  for (std::size_t kk = 0; kk < s.contrasts(); ++kk) {
    auto slab = s.images.slab(kk);
    for (std::size_t v = 0; v < n; ++v) slab[v] *= inv[v];
  }
  return s;
}

namespace {

double cnorm2(const ComplexArray& a) { return k::squared_norm(std::span<const cplx>(a.values())); }

// b += alpha * a
void caxpy(cplx alpha, const ComplexArray& a, ComplexArray& b) {
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += alpha * a[i];
}

}  // namespace

CgSenseResult cg_sense_recon(const KSpaceData& y, const CoilMaps& c, const SamplingMask& p, int iters, double tol) {
  if (y.coils() != c.coils()) throw ShapeError("cg_sense: coil count mismatch");
  check_same_grid(y.grid(), c.grid(), "cg_sense");
  const Grid g = y.grid();
  const std::size_t nc = y.contrasts(), ncoil = y.coils(), n = g.voxels();
  CgSenseResult out{SignalImages(nc, g), std::vector<std::vector<double>>(nc)};

  for (std::size_t kk = 0; kk < nc; ++kk) {
    const SamplingMask pk(BoolArray({1, g.ny, g.nx}, std::vector<std::uint8_t>(p.pattern.slab(kk).begin(),
                                                                                 p.pattern.slab(kk).end())));
    KSpaceData yk(ComplexArray({1, ncoil, g.ny, g.nx},
                               std::vector<cplx>(y.samples.slab(kk).begin(), y.samples.slab(kk).end())));
    yk = apply_mask(std::move(yk), pk);

    SignalImages x(1, g);
    KSpaceData r = yk;
    SignalImages s = encode_adjoint_linear(r, c, pk);
    SignalImages dir = s;
    double gamma = cnorm2(s.images);
    const double gamma0 = gamma;
    auto& trace = out.residual_norms[kk];
    trace.push_back(std::sqrt(cnorm2(r.samples)));

    for (int it = 0; it < iters && gamma > 0.0 && gamma > tol * tol * gamma0; ++it) {
      const KSpaceData q = encode_linear(dir, c, pk);
      const double qq = cnorm2(q.samples);
      if (!(qq > 0.0)) break;
      const double alpha = gamma / qq;
      caxpy(alpha, dir.images, x.images);
      caxpy(-alpha, q.samples, r.samples);
      s = encode_adjoint_linear(r, c, pk);
      const double gamma_new = cnorm2(s.images);
      if (!std::isfinite(gamma_new)) throw NumericalError("cg_sense diverged");
      trace.push_back(std::sqrt(cnorm2(r.samples)));
      const double beta = gamma_new / gamma;
      for (std::size_t i = 0; i < n; ++i) dir.images[i] = s.images[i] + beta * dir.images[i];
      gamma = gamma_new;
    }
    std::copy(x.images.values().begin(), x.images.values().end(), out.images.images.slab(kk).begin());
  }
  return out;
}

namespace {

struct VoxelFit {
  cplx m;
  double r;
};

VoxelFit fit_t2(const cplx* s, std::size_t stride, std::span<const double> te) {
  double sw = 0.0, st = 0.0, sl = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < te.size(); ++k) {
    const double mag = std::abs(s[k * stride]);
    if (mag <= 0.0) continue;
    const double w = mag * mag;
    sw += w;
    st += w * te[k];
    sl += w * std::log(mag);
    ++used;
  }
  if (used < 2) return {cplx{}, 0.0};
  const double tbar = st / sw, lbar = sl / sw;
  double stt = 0.0, stl = 0.0;
  for (std::size_t k = 0; k < te.size(); ++k) {
    const double mag = std::abs(s[k * stride]);
    if (mag <= 0.0) continue;
    const double w = mag * mag;
    stt += w * (te[k] - tbar) * (te[k] - tbar);
    stl += w * (te[k] - tbar) * (std::log(mag) - lbar);
  }
  const double rate = -stl / stt;
  const double m0 = std::exp(lbar + rate * tbar);
  return {std::polar(m0, std::arg(s[0])), rate};
}

// Best complex magnetization and squared residual for a fixed T1 rate.
struct Projection {
  cplx m;
  double cost;
};

Projection project_t1(const cplx* s, std::size_t stride, std::span<const double> ti, double rate) {
  double gg = 0.0;
  cplx gs{};
  for (std::size_t k = 0; k < ti.size(); ++k) {
    const double gk = 1.0 - 2.0 * std::exp(-ti[k] * rate);
    gg += gk * gk;
    gs += gk * s[k * stride];
  }
  const cplx m = gg > 0.0 ? gs / gg : cplx{};
  double cost = 0.0;
  for (std::size_t k = 0; k < ti.size(); ++k) {
    const double gk = 1.0 - 2.0 * std::exp(-ti[k] * rate);
    cost += std::norm(s[k * stride] - m * gk);
  }
  return {m, cost};
}

constexpr std::size_t kRateGrid = 64;

// 0 followed by log-spaced rates from r_max * 1e-4 to r_max.
std::vector<double> rate_grid(double r_max) {
  std::vector<double> grid(kRateGrid);
  grid[0] = 0.0;
  for (std::size_t i = 1; i < kRateGrid; ++i) {
    const double e = -4.0 + 4.0 * static_cast<double>(i - 1) / static_cast<double>(kRateGrid - 2);
    grid[i] = r_max * std::pow(10.0, e);
  }
  return grid;
}

VoxelFit fit_t1(const cplx* s, std::size_t stride, std::span<const double> ti, const std::vector<double>& grid) {
  std::size_t best = 0;
  double best_cost = project_t1(s, stride, ti, grid[0]).cost;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double c = project_t1(s, stride, ti, grid[i]).cost;
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  double lo = grid[best > 0 ? best - 1 : 0];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo), b = lo + kInvPhi * (hi - lo);
  double fa = project_t1(s, stride, ti, a).cost, fb = project_t1(s, stride, ti, b).cost;
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(hi, 1e-300); ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = project_t1(s, stride, ti, a).cost;
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = project_t1(s, stride, ti, b).cost;
    }
  }
  double rate = 0.5 * (lo + hi);
  Projection pr = project_t1(s, stride, ti, rate);
  // The grid point itself may still beat the refined bracket (flat costs).
  if (const Projection at_grid = project_t1(s, stride, ti, grid[best]); at_grid.cost < pr.cost) {
    rate = grid[best];
    pr = at_grid;
  }
  return {pr.m, rate};
}

}  // namespace

ParameterState pixelwise_fit(const SignalImages& s, const AcquisitionProtocol& protocol, double r_max) {
  const std::size_t nc = s.contrasts();
  if (nc != protocol.contrasts()) throw ShapeError("pixelwise_fit: contrast count does not match protocol");
  if (nc < 2) throw ConfigError("pixelwise_fit needs at least two contrasts");
  const Grid g = s.grid();
  const std::size_t n = g.voxels();

  std::vector<double> peak(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t kk = 0; kk < nc; ++kk) peak[v] = std::max(peak[v], std::abs(s.images[kk * n + v]));
  const double p95 = percentile_abs(peak, 0.95);
  const double tau = 1e-3 * p95;

  // Fit on signals scaled by a power of two near 1/p95. The scaling is exact, and
  // inputs that differ by a power of two give bit-identical fits up to that factor.
  int e = 0;
  if (p95 > 0.0) std::frexp(p95, &e);
  const double down = std::ldexp(1.0, -e), up = std::ldexp(1.0, e);
  std::vector<cplx> sn(s.images.data(), s.images.data() + nc * n);
  for (auto& z : sn) z *= down;

  ParameterState out(g);
  const std::vector<double> grid = rate_grid(r_max);
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t vi = 0; vi < nn; ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    if (peak[v] < tau || peak[v] == 0.0) continue;
    const cplx* sv = sn.data() + v;
    const VoxelFit f = protocol.kind == MappingKind::T2 ? fit_t2(sv, n, protocol.times_ms)
                                                        : fit_t1(sv, n, protocol.times_ms, grid);
    out.mx()[v] = up * f.m.real();
    out.my()[v] = up * f.m.imag();
    out.r()[v] = f.r;
  }
  return out;
}

ParameterState seed_from_zero_filled(const Measurement& m, double r_max) {
  ParameterState x = pixelwise_fit(zero_filled_recon(m.y, m.coils, m.mask), m.protocol, r_max);
  project_rate(x, r_max);
  return x;
}

}  // namespace qmri
