// Serial reference kernels against their OpenMP versions, plus the FFT and a
// full objective/gradient evaluation, on the desk grid with 8 contrasts and
// 8 coils. Thread count comes from QMRI_THREADS, all cores when unset.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "qmri/encoding.hpp"
#include "qmri/fft.hpp"
#include "qmri/kernels.hpp"
#include "qmri/objective.hpp"
#include "qmri/parallel.hpp"
#include "qmri/presets.hpp"
#include "qmri/simulate.hpp"

using namespace qmri;

namespace {

constexpr Grid kGrid{52, 64};
constexpr std::size_t kContrasts = 8, kCoils = 8;

struct Data {
  std::vector<double> times, mx, my, r, real_a, real_b;
  std::vector<cplx> signal, coils, coil_data, resid;
  std::vector<std::uint8_t> mask;

  Data() {
    const std::size_t n = kGrid.voxels();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ur(1.0 / 300.0, 1.0 / 30.0);
    for (std::size_t k = 0; k < kContrasts; ++k) times.push_back(23.0 * static_cast<double>(k + 1));
    auto fill = [&](std::vector<double>& v, std::size_t len) {
      v.resize(len);
      for (auto& e : v) e = nd(rng);
    };
    auto fillc = [&](std::vector<cplx>& v, std::size_t len) {
      v.resize(len);
      for (auto& e : v) e = {nd(rng), nd(rng)};
    };
    fill(mx, n);
    fill(my, n);
    r.resize(n);
    for (auto& e : r) e = ur(rng);
    fill(real_a, 3 * n);
    fill(real_b, 3 * n);
    fillc(signal, kContrasts * n);
    fillc(coils, kCoils * n);
    fillc(coil_data, kContrasts * kCoils * n);
    fillc(resid, kContrasts * n);
    mask.resize(kContrasts * n);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = (i / kGrid.nx) % 4 == 0;
  }

  kernels::ModelView view() const { return {MappingKind::T2, times, mx, my, r}; }
};

const Data& data() {
  static const Data d;
  return d;
}

void use_threads() {
  const int n = threads_from_env();
  set_num_threads(n);
}

template <bool Parallel>
void BM_ModelForward(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  std::vector<cplx> out(kContrasts * kGrid.voxels());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::model_forward(d.view(), out);
    else kernels::serial::model_forward(d.view(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_ModelAdjoint(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  const std::size_t n = kGrid.voxels();
  std::vector<double> gmx(n), gmy(n), gr(n);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::model_jacobian_adjoint(d.view(), d.resid, gmx, gmy, gr);
    else kernels::serial::model_jacobian_adjoint(d.view(), d.resid, gmx, gmy, gr);
    benchmark::DoNotOptimize(gr.data());
  }
}

template <bool Parallel>
void BM_ApplyCoils(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  std::vector<cplx> out(kContrasts * kCoils * kGrid.voxels());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::apply_coils(d.signal, d.coils, kContrasts, kCoils, kGrid.voxels(), out);
    else kernels::serial::apply_coils(d.signal, d.coils, kContrasts, kCoils, kGrid.voxels(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_CombineCoils(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  std::vector<cplx> out(kContrasts * kGrid.voxels());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::combine_coils(d.coil_data, d.coils, kContrasts, kCoils, kGrid.voxels(), out);
    else kernels::serial::combine_coils(d.coil_data, d.coils, kContrasts, kCoils, kGrid.voxels(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_ApplyMask(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  std::vector<cplx> work = d.coil_data;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::apply_mask(work, d.mask, kContrasts, kCoils, kGrid.voxels());
    else kernels::serial::apply_mask(work, d.mask, kContrasts, kCoils, kGrid.voxels());
    benchmark::DoNotOptimize(work.data());
  }
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  for (auto _ : state) {
    double s = Parallel ? kernels::omp::dot(d.real_a, d.real_b) : kernels::serial::dot(d.real_a, d.real_b);
    benchmark::DoNotOptimize(s);
  }
}

template <bool Parallel>
void BM_SquaredNormComplex(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  for (auto _ : state) {
    double s = Parallel ? kernels::omp::squared_norm(std::span<const cplx>(d.coil_data))
                        : kernels::serial::squared_norm(std::span<const cplx>(d.coil_data));
    benchmark::DoNotOptimize(s);
  }
}

template <bool Parallel>
void BM_Axpy(benchmark::State& state) {
  use_threads();
  const auto& d = data();
  std::vector<double> y = d.real_b;
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::axpy(1e-9, d.real_a, y);
    else kernels::serial::axpy(1e-9, d.real_a, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_Fft2(benchmark::State& state) {
  use_threads();
  std::vector<cplx> work = data().coil_data;
  const std::size_t slices = kContrasts * kCoils;
  const Exec exec = Parallel ? Exec::parallel : Exec::serial;
  for (auto _ : state) {
    fft2_centered(work, slices, kGrid, FftDirection::forward, exec);
    fft2_centered(work, slices, kGrid, FftDirection::inverse, exec);
    benchmark::DoNotOptimize(work.data());
  }
}

void BM_ObjectiveAndGradient(benchmark::State& state) {
  use_threads();
  const auto prot = t2_protocol();
  const auto truth = make_phantom(head_phantom(kGrid, MappingKind::T2)).truth;
  const auto c = make_coil_maps(kCoils, kGrid);
  MaskSpec ms;
  ms.accel = 4;
  ms.acs_width = 8;
  const auto p = make_mask(ms, kGrid, prot.contrasts());
  const auto m = Measurement::masked(simulate_kspace(truth, prot, c, 0.01, 1), prot, c, p);
  ParameterState x = truth;
  for (auto& v : x.r()) v *= 1.1;
  for (auto _ : state) {
    const auto e = evaluate(x, m, {});
    auto g = gradient_at(x, e, m, {});
    benchmark::DoNotOptimize(g.packed().data());
  }
}

}  // namespace

BENCHMARK(BM_ModelForward<false>)->Name("model_forward/serial");
BENCHMARK(BM_ModelForward<true>)->Name("model_forward/omp");
BENCHMARK(BM_ModelAdjoint<false>)->Name("model_adjoint/serial");
BENCHMARK(BM_ModelAdjoint<true>)->Name("model_adjoint/omp");
BENCHMARK(BM_ApplyCoils<false>)->Name("apply_coils/serial");
BENCHMARK(BM_ApplyCoils<true>)->Name("apply_coils/omp");
BENCHMARK(BM_CombineCoils<false>)->Name("combine_coils/serial");
BENCHMARK(BM_CombineCoils<true>)->Name("combine_coils/omp");
BENCHMARK(BM_ApplyMask<false>)->Name("apply_mask/serial");
BENCHMARK(BM_ApplyMask<true>)->Name("apply_mask/omp");
BENCHMARK(BM_Dot<false>)->Name("dot/serial");
BENCHMARK(BM_Dot<true>)->Name("dot/omp");
BENCHMARK(BM_SquaredNormComplex<false>)->Name("squared_norm/serial");
BENCHMARK(BM_SquaredNormComplex<true>)->Name("squared_norm/omp");
BENCHMARK(BM_Axpy<false>)->Name("axpy/serial");
BENCHMARK(BM_Axpy<true>)->Name("axpy/omp");
BENCHMARK(BM_Fft2<false>)->Name("fft2_roundtrip/serial");
BENCHMARK(BM_Fft2<true>)->Name("fft2_roundtrip/omp");
BENCHMARK(BM_ObjectiveAndGradient)->Name("objective_and_gradient/desk_t2");

BENCHMARK_MAIN();
