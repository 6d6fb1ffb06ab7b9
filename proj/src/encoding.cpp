#include "qmri/encoding.hpp"

#include "qmri/fft.hpp"
#include "qmri/kernels.hpp"
#include "qmri/signal_model.hpp"

namespace qmri {

namespace {

void check_mask(const SamplingMask& p, std::size_t contrasts, Grid g) {
  if (p.contrasts() != contrasts) throw ShapeError("mask contrast count does not match data");
  check_same_grid(p.grid(), g, "mask");
}

}  // namespace

KSpaceData apply_coils(const SignalImages& s, const CoilMaps& c) {
  check_same_grid(s.grid(), c.grid(), "apply_coils");
  const Grid g = s.grid();
  KSpaceData out(s.contrasts(), c.coils(), g);
  kernels::omp::apply_coils(s.images.values(), c.maps.values(), s.contrasts(), c.coils(), g.voxels(),
                            out.samples.values());
  return out;
}

KSpaceData apply_mask(KSpaceData k, const SamplingMask& p) {
  check_mask(p, k.contrasts(), k.grid());
  kernels::omp::apply_mask(k.samples.values(), p.pattern.values(), k.contrasts(), k.coils(), k.grid().voxels());
  return k;
}

KSpaceData encode_linear(const SignalImages& s, const CoilMaps& c, const SamplingMask& p) {
  KSpaceData k = apply_coils(s, c);
  fft2_centered(k.samples.values(), k.contrasts() * k.coils(), k.grid(), FftDirection::forward);
  return apply_mask(std::move(k), p);
}

SignalImages encode_adjoint_linear(const KSpaceData& k, const CoilMaps& c, const SamplingMask& p) {
  check_same_grid(k.grid(), c.grid(), "encode_adjoint_linear");
  if (k.coils() != c.coils()) throw ShapeError("k-space coil count does not match coil maps");
  KSpaceData tmp = apply_mask(k, p);
  fft2_centered(tmp.samples.values(), tmp.contrasts() * tmp.coils(), tmp.grid(), FftDirection::inverse);
  SignalImages out(k.contrasts(), k.grid());
  kernels::omp::combine_coils(tmp.samples.values(), c.maps.values(), k.contrasts(), k.coils(), k.grid().voxels(),
                              out.images.values());
  return out;
}

KSpaceData encode(const ParameterState& x, const AcquisitionProtocol& protocol, const CoilMaps& c,
                  const SamplingMask& p) {
  return encode_linear(model_forward(x, protocol), c, p);
}

}  // namespace qmri
