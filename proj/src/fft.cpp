#include "qmri/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace qmri {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per (ny, nx, sign) and kept for the process.
fftw_plan plan_for(std::size_t ny, std::size_t nx, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(ny, nx, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<cplx> scratch(ny * nx);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw Error("FFTW failed to create a plan");
  cache.emplace(key, plan);
  return plan;
}

void transform_slice(cplx* slice, std::vector<cplx>& tmp, Grid g, fftw_plan plan, double scale) {
  const std::size_t ny = g.ny, nx = g.nx;
  // ifftshift into tmp
  for (std::size_t y = 0; y < ny; ++y) {
    const std::size_t sy = (y + ny / 2) % ny;
    for (std::size_t x = 0; x < nx; ++x) tmp[y * nx + x] = slice[sy * nx + (x + nx / 2) % nx];
  }
  auto* buf = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_execute_dft(plan, buf, buf);
  // fftshift back into the slice
  const std::size_t hy = (ny + 1) / 2, hx = (nx + 1) / 2;
  for (std::size_t y = 0; y < ny; ++y) {
    const std::size_t sy = (y + hy) % ny;
    for (std::size_t x = 0; x < nx; ++x) slice[y * nx + x] = tmp[sy * nx + (x + hx) % nx] * scale;
  }
}

}  // namespace

void fft2_centered(std::span<cplx> data, std::size_t slices, Grid grid, FftDirection dir, Exec exec) {
  const std::size_t n = grid.voxels();
  if (n == 0) throw ShapeError("fft2 needs ny, nx >= 1");
  if (data.size() != slices * n) throw ShapeError("fft2 batch size mismatch");
  const fftw_plan plan = plan_for(grid.ny, grid.nx, dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  if (exec == Exec::serial) {
    std::vector<cplx> tmp(n);
    for (std::size_t s = 0; s < slices; ++s) transform_slice(data.data() + s * n, tmp, grid, plan, scale);
    return;
  }
  const auto ns = static_cast<std::ptrdiff_t>(slices);
#pragma omp parallel
  {
    std::vector<cplx> tmp(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < ns; ++s) transform_slice(data.data() + static_cast<std::size_t>(s) * n, tmp, grid, plan, scale);
  }
}

namespace {

ComplexArray transform(ComplexArray a, FftDirection dir) {
  if (a.rank() < 2) throw ShapeError("fft2 needs an array of rank >= 2");
  const Grid g{a.extent(a.rank() - 2), a.extent(a.rank() - 1)};
  fft2_centered(a.values(), g.voxels() ? a.size() / g.voxels() : 0, g, dir);
  return a;
}

}  // namespace

ComplexArray fft2_unitary(ComplexArray a) { return transform(std::move(a), FftDirection::forward); }
ComplexArray ifft2_unitary(ComplexArray a) { return transform(std::move(a), FftDirection::inverse); }

}  // namespace qmri
