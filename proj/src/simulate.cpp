#include "qmri/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qmri/encoding.hpp"
#include "qmri/kernels.hpp"

namespace qmri {

namespace {

double norm_coord(std::size_t i, std::size_t n) {
  const double half = static_cast<double>(n) / 2.0;
  return (static_cast<double>(i) - half) / half;
}

// Uniform index in [0, n) from the generator's raw output.
std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// First `count` entries of `items` become a uniformly random subset.
template <class T>
void partial_shuffle(std::vector<T>& items, std::size_t count, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) std::swap(items[i], items[i + draw_index(rng, items.size() - i)]);
}

}  // namespace

void PhantomSpec::validate() const {
  if (grid.ny == 0 || grid.nx == 0) throw ConfigError("phantom grid must be nonempty");
  if (background_t_ms < 0.0) throw ConfigError("background T must be >= 0");
  for (const auto& e : ellipses) {
    if (!(e.t_ms > 0.0)) throw ConfigError("ellipse T must be positive");
    if (std::abs(e.cx) > 1.0 || std::abs(e.cy) > 1.0 || !(e.ax > 0.0) || !(e.ay > 0.0) || e.ax > 1.0 ||
        e.ay > 1.0) {
      throw ConfigError("ellipse geometry outside normalized bounds [-1, 1]");
    }
  }
}

Phantom make_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Grid g = spec.grid;
  Phantom out{ParameterState(g), BoolArray({spec.ellipses.size(), g.ny, g.nx}, 0)};
  std::vector<long> owner(g.voxels(), -1);
  for (std::size_t y = 0; y < g.ny; ++y) {
    const double py = norm_coord(y, g.ny);
    for (std::size_t x = 0; x < g.nx; ++x) {
      const double px = norm_coord(x, g.nx);
      for (std::size_t e = 0; e < spec.ellipses.size(); ++e) {
        const Ellipse& el = spec.ellipses[e];
        const double th = el.rotation_deg * std::numbers::pi / 180.0;
        const double dx = px - el.cx, dy = py - el.cy;
        const double u = (dx * std::cos(th) + dy * std::sin(th)) / el.ax;
        const double w = (-dx * std::sin(th) + dy * std::cos(th)) / el.ay;
        if (u * u + w * w <= 1.0) owner[y * g.nx + x] = static_cast<long>(e);
      }
    }
  }
  const double r_background = spec.background_t_ms > 0.0 ? 1.0 / spec.background_t_ms : 0.0;
  for (std::size_t v = 0; v < g.voxels(); ++v) {
    if (owner[v] < 0) {
      out.truth.r()[v] = r_background;
      continue;
    }
    const auto e = static_cast<std::size_t>(owner[v]);
    const Ellipse& el = spec.ellipses[e];
    out.truth.mx()[v] = el.magnetization.real();
    out.truth.my()[v] = el.magnetization.imag();
    out.truth.r()[v] = 1.0 / el.t_ms;
    out.tissue[e * g.voxels() + v] = 1;
  }
  return out;
}

CoilMaps make_coil_maps(std::size_t n_coil, Grid grid) {
  if (n_coil == 0) throw ConfigError("n_coil must be >= 1");
  constexpr double kLobeRadius = 1.1;
  constexpr double kLobeWidth = 0.8;
  constexpr double kPhaseSlope = 0.5 * std::numbers::pi;
  const std::size_t n = grid.voxels();
  ComplexArray maps({n_coil, grid.ny, grid.nx});
  for (std::size_t j = 0; j < n_coil; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_coil);
    const double ox = kLobeRadius * std::cos(th), oy = kLobeRadius * std::sin(th);
    for (std::size_t y = 0; y < grid.ny; ++y) {
      const double py = norm_coord(y, grid.ny);
      for (std::size_t x = 0; x < grid.nx; ++x) {
        const double px = norm_coord(x, grid.nx);
        const double d2 = (px - ox) * (px - ox) + (py - oy) * (py - oy);
        const double mag = std::exp(-d2 / (2.0 * kLobeWidth * kLobeWidth));
        const double phase = th + kPhaseSlope * (std::cos(th) * px + std::sin(th) * py);
        maps[j * n + y * grid.nx + x] = std::polar(mag, phase);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    double ss = 0.0;
    for (std::size_t j = 0; j < n_coil; ++j) ss += std::norm(maps[j * n + v]);
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t j = 0; j < n_coil; ++j) maps[j * n + v] *= inv;
  }
  return CoilMaps(std::move(maps));
}

std::string to_string(MaskScheme s) { return s == MaskScheme::equispaced ? "equispaced" : "uniform_random"; }

MaskScheme parse_mask_scheme(const std::string& s) {
  if (s == "equispaced") return MaskScheme::equispaced;
  if (s == "uniform_random") return MaskScheme::uniform_random;
  throw ConfigError("unknown mask scheme '" + s + "'");
}

void MaskSpec::validate(Grid grid) const {
  if (accel < 1) throw ConfigError("mask.accel must be >= 1");
  if (acs_width > grid.ny) throw ConfigError("mask.acs_width exceeds ny");
}

std::size_t acs_start(std::size_t ny, std::size_t width) { return ny / 2 - width / 2; }

SamplingMask make_mask(const MaskSpec& spec, Grid grid, std::size_t n_contrast) {
  spec.validate(grid);
  if (n_contrast == 0) throw ConfigError("mask needs at least one contrast");
  const std::size_t ny = grid.ny, nx = grid.nx;
  BoolArray pattern({n_contrast, ny, nx}, 0);
  std::mt19937_64 rng(spec.seed);

  auto draw_lines = [&]() {
    std::vector<std::uint8_t> lines(ny, 0);
    if (spec.scheme == MaskScheme::equispaced) {
      for (std::size_t y = 0; y < ny; y += spec.accel) lines[y] = 1;
    } else {
      std::vector<std::size_t> idx(ny);
      for (std::size_t y = 0; y < ny; ++y) idx[y] = y;
      const std::size_t keep = (ny + spec.accel - 1) / spec.accel;
      partial_shuffle(idx, keep, rng);
      for (std::size_t i = 0; i < keep; ++i) lines[idx[i]] = 1;
    }
    const std::size_t a0 = acs_start(ny, spec.acs_width);
    for (std::size_t y = a0; y < a0 + spec.acs_width; ++y) lines[y] = 1;
    return lines;
  };

  const bool redraw = spec.per_contrast && spec.scheme == MaskScheme::uniform_random;
  std::vector<std::uint8_t> lines = draw_lines();
  for (std::size_t k = 0; k < n_contrast; ++k) {
    if (redraw && k > 0) lines = draw_lines();
    auto slab = pattern.slab(k);
    for (std::size_t y = 0; y < ny; ++y)
      if (lines[y]) std::fill_n(slab.begin() + static_cast<std::ptrdiff_t>(y * nx), nx, std::uint8_t{1});
  }
  return SamplingMask(std::move(pattern));
}

std::size_t sampled_lines(const SamplingMask& p, std::size_t contrast) {
  const Grid g = p.grid();
  auto slab = p.pattern.slab(contrast);
  std::size_t lines = 0;
  for (std::size_t y = 0; y < g.ny; ++y) {
    auto row = slab.subspan(y * g.nx, g.nx);
    if (std::find(row.begin(), row.end(), std::uint8_t{1}) != row.end()) ++lines;
  }
  return lines;
}

double net_acceleration(const SamplingMask& p, std::size_t contrast) {
  const std::size_t lines = sampled_lines(p, contrast);
  if (lines == 0) throw DomainError("mask has no sampled lines");
  return static_cast<double>(p.grid().ny) / static_cast<double>(lines);
}

KSpaceData simulate_kspace(const ParameterState& x_true, const AcquisitionProtocol& protocol, const CoilMaps& c,
                           double noise_sigma, std::uint64_t rng_seed) {
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  KSpaceData k = encode(x_true, protocol, c, SamplingMask::full(protocol.contrasts(), x_true.grid()));
  if (noise_sigma == 0.0) return k;
  std::mt19937_64 rng(rng_seed);
  // Box-Muller on 53-bit uniforms so the stream is fixed by the engine alone.
  auto uniform = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  for (cplx& z : k.samples.values()) {
    const double rad = noise_sigma * std::sqrt(-2.0 * std::log(uniform()));
    const double th = 2.0 * std::numbers::pi * uniform();
    z += cplx{rad * std::cos(th), rad * std::sin(th)};
  }
  return k;
}

double noise_sigma_for_snr(const KSpaceData& clean, double snr_db) {
  const double rms =
      std::sqrt(kernels::omp::squared_norm(std::span<const cplx>(clean.samples.values())) / clean.samples.size());
  return rms / (std::sqrt(2.0) * std::pow(10.0, snr_db / 20.0));
}

MaskSplit split_mask(const SamplingMask& p, std::size_t acs_width, double rho, std::uint64_t seed) {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("split rho must be in (0, 1)");
  const Grid g = p.grid();
  if (acs_width > g.ny) throw ConfigError("acs_width exceeds ny");
  const std::size_t a0 = acs_start(g.ny, acs_width), a1 = a0 + acs_width;
  MaskSplit out{p, SamplingMask(BoolArray(p.pattern.shape(), 0))};
  std::mt19937_64 rng(seed);

  for (std::size_t k = 0; k < p.contrasts(); ++k) {
    auto src = p.pattern.slab(k);
    std::vector<std::size_t> candidates;
    bool has_acs_samples = false;
    for (std::size_t v = 0; v < g.voxels(); ++v) {
      if (!src[v]) continue;
      const std::size_t y = v / g.nx;
      if (y >= a0 && y < a1) {
        has_acs_samples = true;
      } else {
        candidates.push_back(v);
      }
    }
    if (candidates.empty()) {
      throw DomainError("split_mask: contrast " + std::to_string(k) + " has no non-ACS samples");
    }
    const std::size_t n = candidates.size();
    // Both masks must keep at least one sample.
    const std::size_t max_count = has_acs_samples ? n : n - 1;
    if (max_count == 0) throw DomainError("split_mask: too few samples to split contrast " + std::to_string(k));
    const auto wanted = static_cast<std::size_t>(std::llround(rho * static_cast<double>(n)));
    const std::size_t count = std::clamp<std::size_t>(wanted, 1, max_count);
    partial_shuffle(candidates, count, rng);
    auto train = out.train.pattern.slab(k);
    auto loss = out.loss.pattern.slab(k);
    for (std::size_t i = 0; i < count; ++i) {
      train[candidates[i]] = 0;
      loss[candidates[i]] = 1;
    }
  }
  return out;
}

}  // namespace qmri
