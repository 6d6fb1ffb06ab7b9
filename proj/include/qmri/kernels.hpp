#pragma once

// Voxel- and slice-parallel inner loops of the forward model, its adjoint,
// and the solver's vector algebra. Each kernel exists twice with the same
// signature: `serial` is the plain reference, `omp` the OpenMP version the
// library uses. Tests hold the two to agreement; bench/ times them.
//
// Reductions in `omp` sum fixed-size blocks in parallel and combine the block
// partials in order, so results do not depend on the thread count.

#include <cstddef>
#include <span>

#include "qmri/ndarray.hpp"
#include "qmri/types.hpp"

namespace qmri::kernels {

struct ModelView {
  MappingKind kind;
  std::span<const double> times;
  std::span<const double> mx;
  std::span<const double> my;
  std::span<const double> r;
};

namespace serial {

// out[k*N + v] = (mx + i my) * f_k(r)
void model_forward(const ModelView& x, std::span<cplx> out);
// g = 2 Re(J^H resid), one output span per channel
void model_jacobian_adjoint(const ModelView& x, std::span<const cplx> resid, std::span<double> gmx,
                            std::span<double> gmy, std::span<double> gr);
// out[k, j] = c[j] * s[k]
void apply_coils(std::span<const cplx> s, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                 std::size_t voxels, std::span<cplx> out);
// out[k] = sum_j conj(c[j]) * in[k, j]
void combine_coils(std::span<const cplx> in, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                   std::size_t voxels, std::span<cplx> out);
// zeroes data[k, j, v] where mask[k, v] is false
void apply_mask(std::span<cplx> data, std::span<const std::uint8_t> mask, std::size_t contrasts,
                std::size_t coils, std::size_t voxels);
void subtract(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
double squared_norm(std::span<const cplx> a);
double squared_norm(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace omp {

// out[k*N + v] = (mx + i my) * f_k(r)
void model_forward(const ModelView& x, std::span<cplx> out);
// g = 2 Re(J^H resid), one output span per channel
void model_jacobian_adjoint(const ModelView& x, std::span<const cplx> resid, std::span<double> gmx,
                            std::span<double> gmy, std::span<double> gr);
// out[k, j] = c[j] * s[k]
void apply_coils(std::span<const cplx> s, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                 std::size_t voxels, std::span<cplx> out);
// out[k] = sum_j conj(c[j]) * in[k, j]
void combine_coils(std::span<const cplx> in, std::span<const cplx> c, std::size_t contrasts, std::size_t coils,
                   std::size_t voxels, std::span<cplx> out);
// zeroes data[k, j, v] where mask[k, v] is false
void apply_mask(std::span<cplx> data, std::span<const std::uint8_t> mask, std::size_t contrasts,
                std::size_t coils, std::size_t voxels);
void subtract(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
double squared_norm(std::span<const cplx> a);
double squared_norm(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace omp

}  // namespace qmri::kernels
