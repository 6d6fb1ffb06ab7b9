#include "model_math.hpp"
#include "qmri/kernels.hpp"

namespace qmri::kernels::serial {

void model_forward(const ModelView& x, std::span<cplx> out) {
  const std::size_t n = x.mx.size();
  for (std::size_t v = 0; v < n; ++v) detail::forward_voxel(x, v, n, out.data());
}

void model_jacobian_adjoint(const ModelView& x, std::span<const cplx> resid, std::span<double> gmx,
                            std::span<double> gmy, std::span<double> gr) {
  const std::size_t n = x.mx.size();
  for (std::size_t v = 0; v < n; ++v) detail::adjoint_voxel(x, v, n, resid.data(), gmx[v], gmy[v], gr[v]);
}

void apply_coils(std::span<const cplx> s, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                 std::size_t voxels, std::span<cplx> out) {
  for (std::size_t k = 0; k < contrasts; ++k)
    for (std::size_t j = 0; j < coils; ++j)
      for (std::size_t v = 0; v < voxels; ++v) out[(k * coils + j) * voxels + v] = c[j * voxels + v] * s[k * voxels + v];
}

void combine_coils(std::span<const cplx> in, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                   std::size_t voxels, std::span<cplx> out) {
  for (std::size_t k = 0; k < contrasts; ++k) {
    for (std::size_t v = 0; v < voxels; ++v) {
      cplx acc{};
      for (std::size_t j = 0; j < coils; ++j) acc += std::conj(c[j * voxels + v]) * in[(k * coils + j) * voxels + v];
      out[k * voxels + v] = acc;
    }
  }
}

void apply_mask(std::span<cplx> data, std::span<const std::uint8_t> mask, std::size_t contrasts, std::size_t coils,
                std::size_t voxels) {
  for (std::size_t k = 0; k < contrasts; ++k)
    for (std::size_t j = 0; j < coils; ++j)
      for (std::size_t v = 0; v < voxels; ++v)
        if (!mask[k * voxels + v]) data[(k * coils + j) * voxels + v] = cplx{};
}

void subtract(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
}

double squared_norm(std::span<const cplx> a) {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  return s;
}

double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double z : a) s += z * z;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace qmri::kernels::serial
