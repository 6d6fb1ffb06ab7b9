#include "qmri/regularizer.hpp"

#include <cmath>

namespace qmri {

std::vector<double> gaussian_smooth(std::span<const double> image, Grid grid, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_smooth sigma must be positive");
  const auto radius = static_cast<long>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (long i = -radius; i <= radius; ++i) {
    kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
  }
  const long ny = static_cast<long>(grid.ny), nx = static_cast<long>(grid.nx);

  // Truncated at the border and renormalized over the in-range taps.
  auto pass = [&](std::span<const double> in, std::vector<double>& out, bool along_x) {
#pragma omp parallel for schedule(static)
    for (long y = 0; y < ny; ++y) {
      for (long x = 0; x < nx; ++x) {
        double acc = 0.0, wsum = 0.0;
        for (long t = -radius; t <= radius; ++t) {
          const long yy = along_x ? y : y + t;
          const long xx = along_x ? x + t : x;
          if (yy < 0 || yy >= ny || xx < 0 || xx >= nx) continue;
          const double w = kernel[static_cast<std::size_t>(t + radius)];
          acc += w * in[static_cast<std::size_t>(yy * nx + xx)];
          wsum += w;
        }
        out[static_cast<std::size_t>(y * nx + x)] = acc / wsum;
      }
    }
  };
  std::vector<double> tmp(image.size()), out(image.size());
  pass(image, tmp, true);
  pass(tmp, out, false);
  return out;
}

double total_variation(std::span<const double> image, Grid grid) {
  double tv = 0.0;
  for (std::size_t y = 0; y < grid.ny; ++y) {
    for (std::size_t x = 0; x < grid.nx; ++x) {
      const double u = image[y * grid.nx + x];
      const double gx = x + 1 < grid.nx ? image[y * grid.nx + x + 1] - u : 0.0;
      const double gy = y + 1 < grid.ny ? image[(y + 1) * grid.nx + x] - u : 0.0;
      tv += std::hypot(gx, gy);
    }
  }
  return tv;
}

// Dual projection iteration for min_u 1/2 ||u - f||^2 + weight * TV(u).
std::vector<double> tv_denoise(std::span<const double> image, Grid grid, double weight, int iters) {
  if (weight < 0.0) throw ConfigError("tv_denoise weight must be >= 0");
  if (iters < 0) throw ConfigError("tv_denoise iters must be >= 0");
  std::vector<double> u(image.begin(), image.end());
  if (weight == 0.0 || iters == 0) return u;

  const std::size_t ny = grid.ny, nx = grid.nx, n = grid.voxels();
  constexpr double kTau = 0.125;
  std::vector<double> px(n, 0.0), py(n, 0.0), div(n, 0.0);
  const auto nyl = static_cast<std::ptrdiff_t>(ny);

  auto divergence = [&]() {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t yi = 0; yi < nyl; ++yi) {
      const auto y = static_cast<std::size_t>(yi);
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t i = y * nx + x;
        double d = 0.0;
        if (x + 1 < nx) d += px[i];
        if (x > 0) d -= px[i - 1];
        if (y + 1 < ny) d += py[i];
        if (y > 0) d -= py[i - nx];
        div[i] = d;
      }
    }
  };

  for (int it = 0; it < iters; ++it) {
    divergence();
    // w = div p - f / weight; p <- (p + tau grad w) / (1 + tau |grad w|)
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t yi = 0; yi < nyl; ++yi) {
      const auto y = static_cast<std::size_t>(yi);
      for (std::size_t x = 0; x < nx; ++x) {
        const std::size_t i = y * nx + x;
        const double w = div[i] - image[i] / weight;
        const double gx = x + 1 < nx ? (div[i + 1] - image[i + 1] / weight) - w : 0.0;
        const double gy = y + 1 < ny ? (div[i + nx] - image[i + nx] / weight) - w : 0.0;
        const double denom = 1.0 + kTau * std::hypot(gx, gy);
        px[i] = (px[i] + kTau * gx) / denom;
        py[i] = (py[i] + kTau * gy) / denom;
      }
    }
  }
  divergence();
  for (std::size_t i = 0; i < n; ++i) u[i] = image[i] - weight * div[i];
  return u;
}

namespace {

class IdentityRegularizer final : public Regularizer {
 public:
  ParameterState apply(const ParameterState& x, const RegularizerContext&) override { return x; }
  std::string name() const override { return "identity"; }
};

template <class Filter>
ParameterState per_channel(const ParameterState& x, Filter&& filter) {
  ParameterState z(x.grid());
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto ch = static_cast<Channel>(c);
    const std::vector<double> out = filter(x.channel(ch));
    std::copy(out.begin(), out.end(), z.channel(ch).begin());
  }
  return z;
}

class GaussianRegularizer final : public Regularizer {
 public:
  explicit GaussianRegularizer(double sigma) : sigma_(sigma) {}
  ParameterState apply(const ParameterState& x, const RegularizerContext&) override {
    return per_channel(x, [&](std::span<const double> ch) { return gaussian_smooth(ch, x.grid(), sigma_); });
  }
  std::string name() const override { return "gaussian_smooth"; }

 private:
  double sigma_;
};

class TvRegularizer final : public Regularizer {
 public:
  TvRegularizer(double weight, int iters) : weight_(weight), iters_(iters) {}
  ParameterState apply(const ParameterState& x, const RegularizerContext&) override {
    return per_channel(x, [&](std::span<const double> ch) { return tv_denoise(ch, x.grid(), weight_, iters_); });
  }
  std::string name() const override { return "tv_denoise"; }

 private:
  double weight_;
  int iters_;
};

}  // namespace

std::unique_ptr<Regularizer> builtin_regularizer(const RegularizerSpec& spec) {
  if (spec.name == "identity") return std::make_unique<IdentityRegularizer>();
  if (spec.name == "gaussian_smooth") {
    if (!(spec.sigma > 0.0)) throw ConfigError("gaussian_smooth sigma must be positive");
    return std::make_unique<GaussianRegularizer>(spec.sigma);
  }
  if (spec.name == "tv_denoise") {
    if (spec.weight < 0.0) throw ConfigError("tv_denoise weight must be >= 0");
    if (spec.iters < 0) throw ConfigError("tv_denoise iters must be >= 0");
    return std::make_unique<TvRegularizer>(spec.weight, spec.iters);
  }
  throw ConfigError("unknown regularizer '" + spec.name + "'");
}

std::unique_ptr<Regularizer> make_regularizer(const RegularizerSpec& spec) {
  if (spec.name == "external") {
    if (spec.command.empty()) throw ConfigError("external regularizer needs a command");
    return external_regularizer(spec.command, spec.workdir, spec.timeout);
  }
  return builtin_regularizer(spec);
}

}  // namespace qmri
