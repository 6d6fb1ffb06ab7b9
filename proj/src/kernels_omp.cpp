#include <omp.h>

#include <vector>

#include "model_math.hpp"
#include "qmri/kernels.hpp"

namespace qmri::kernels::omp {

namespace {

// Blocked reduction with a thread-count-independent combination order.
template <class BlockSum>
double blocked_sum(std::size_t n, BlockSum&& block_sum) {
  const std::size_t blocks = (n + detail::kReductionBlock - 1) / detail::kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * detail::kReductionBlock;
    const std::size_t hi = std::min(n, lo + detail::kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block_sum(lo, hi);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

void model_forward(const ModelView& x, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.mx.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < n; ++v)
    detail::forward_voxel(x, static_cast<std::size_t>(v), static_cast<std::size_t>(n), out.data());
}

void model_jacobian_adjoint(const ModelView& x, std::span<const cplx> resid, std::span<double> gmx,
                            std::span<double> gmy, std::span<double> gr) {
  const auto n = static_cast<std::ptrdiff_t>(x.mx.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t v = 0; v < n; ++v) {
    const auto u = static_cast<std::size_t>(v);
    detail::adjoint_voxel(x, u, static_cast<std::size_t>(n), resid.data(), gmx[u], gmy[u], gr[u]);
  }
}

void apply_coils(std::span<const cplx> s, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                 std::size_t voxels, std::span<cplx> out) {
  const auto slices = static_cast<std::ptrdiff_t>(contrasts * coils);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kj = 0; kj < slices; ++kj) {
    const std::size_t k = static_cast<std::size_t>(kj) / coils;
    const std::size_t j = static_cast<std::size_t>(kj) % coils;
    cplx* o = out.data() + static_cast<std::size_t>(kj) * voxels;
    const cplx* cj = c.data() + j * voxels;
    const cplx* sk = s.data() + k * voxels;
    for (std::size_t v = 0; v < voxels; ++v) o[v] = cj[v] * sk[v];
  }
}

void combine_coils(std::span<const cplx> in, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                   std::size_t voxels, std::span<cplx> out) {
  const auto total = static_cast<std::ptrdiff_t>(contrasts * voxels);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kv = 0; kv < total; ++kv) {
    const std::size_t k = static_cast<std::size_t>(kv) / voxels;
    const std::size_t v = static_cast<std::size_t>(kv) % voxels;
    cplx acc{};
    for (std::size_t j = 0; j < coils; ++j) acc += std::conj(c[j * voxels + v]) * in[(k * coils + j) * voxels + v];
    out[static_cast<std::size_t>(kv)] = acc;
  }
}

void apply_mask(std::span<cplx> data, std::span<const std::uint8_t> mask, std::size_t contrasts, std::size_t coils,
                std::size_t voxels) {
  const auto slices = static_cast<std::ptrdiff_t>(contrasts * coils);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kj = 0; kj < slices; ++kj) {
    const std::size_t k = static_cast<std::size_t>(kj) / coils;
    cplx* d = data.data() + static_cast<std::size_t>(kj) * voxels;
    const std::uint8_t* m = mask.data() + k * voxels;
    for (std::size_t v = 0; v < voxels; ++v)
      if (!m[v]) d[v] = cplx{};
  }
}

void subtract(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
}

double squared_norm(std::span<const cplx> a) {
  return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::norm(a[i]);
    return s;
  });
}

double squared_norm(std::span<const double> a) {
  return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * a[i];
    return s;
  });
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

}  // namespace qmri::kernels::omp
