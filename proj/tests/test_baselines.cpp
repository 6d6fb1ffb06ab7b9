#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qmri/baselines.hpp"
#include "qmri/metrics.hpp"
#include "qmri/presets.hpp"
#include "qmri/signal_model.hpp"
#include "qmri/simulate.hpp"

using namespace qmri;

namespace {

struct Data {
  ParameterState truth;
  AcquisitionProtocol prot;
  CoilMaps c;
};

Data phantom_data(MappingKind kind, Grid g = {24, 20}, std::size_t coils = 4) {
  return {make_phantom(head_phantom(g, kind)).truth, kind == MappingKind::T2 ? t2_protocol() : t1_protocol(),
          make_coil_maps(coils, g)};
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(ZeroFilled, FullSamplingRecoversImages) {
  const auto d = phantom_data(MappingKind::T2);
  const Grid g = d.truth.grid();
  const auto y = simulate_kspace(d.truth, d.prot, d.c, 0.0, 1);
  const auto s = zero_filled_recon(y, d.c, SamplingMask::full(d.prot.contrasts(), g));
  EXPECT_LT(max_abs_diff(s.images.values(), model_forward(d.truth, d.prot).images.values()), 1e-10);
}

TEST(ZeroFilled, ZeroDataGivesZeroImages) {
  const Grid g{8, 8};
  const auto s = zero_filled_recon(KSpaceData(3, 2, g), make_coil_maps(2, g), SamplingMask::full(3, g));
  for (const auto& z : s.images.values()) EXPECT_EQ(z, cplx{});
}

TEST(ZeroFilled, UndersamplingAliases) {
  const auto d = phantom_data(MappingKind::T2);
  const Grid g = d.truth.grid();
  MaskSpec ms;
  ms.accel = 4;
  const auto p = make_mask(ms, g, d.prot.contrasts());
  const auto y = simulate_kspace(d.truth, d.prot, d.c, 0.0, 1);
  const auto s = zero_filled_recon(y, d.c, p);
  const auto ref = model_forward(d.truth, d.prot);
  EXPECT_GT(nrmse(s.images.values(), ref.images.values()), 0.1);
}

TEST(CgSense, FullSamplingMatchesZeroFilled) {
  const auto d = phantom_data(MappingKind::T1);
  const Grid g = d.truth.grid();
  const auto p = SamplingMask::full(d.prot.contrasts(), g);
  const auto y = simulate_kspace(d.truth, d.prot, d.c, 0.01, 2);
  const auto cg = cg_sense_recon(y, d.c, p, 20);
  const auto zf = zero_filled_recon(y, d.c, p);
  EXPECT_LT(max_abs_diff(cg.images.images.values(), zf.images.values()), 1e-8);
}

TEST(CgSense, ZeroDataGivesZero) {
  const Grid g{8, 8};
  const auto cg = cg_sense_recon(KSpaceData(2, 2, g), make_coil_maps(2, g), SamplingMask::full(2, g), 10);
  for (const auto& z : cg.images.images.values()) EXPECT_EQ(z, cplx{});
}

TEST(CgSense, ResidualIsNonincreasingAndBeatsZeroFilled) {
  const auto d = phantom_data(MappingKind::T2);
  const Grid g = d.truth.grid();
  MaskSpec ms;
  ms.accel = 3;
  ms.acs_width = 4;
  const auto p = make_mask(ms, g, d.prot.contrasts());
  const auto y = simulate_kspace(d.truth, d.prot, d.c, 0.001, 3);
  const auto cg = cg_sense_recon(y, d.c, p, 30, 0.0);
  for (const auto& trace : cg.residual_norms) {
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] * (1 + 1e-12));
    EXPECT_LT(trace.back(), trace.front());
  }
  const auto ref = model_forward(d.truth, d.prot);
  EXPECT_LT(nrmse(cg.images.images.values(), ref.images.values()),
            nrmse(zero_filled_recon(y, d.c, p).images.values(), ref.images.values()));
}

TEST(PixelwiseFit, T2SingleTissueIsExact) {
  const Grid g{3, 4};
  ParameterState x(g);
  for (std::size_t v = 0; v < g.voxels(); ++v) {
    x.mx()[v] = 0.8;
    x.my()[v] = -0.3;
    x.r()[v] = 0.01;
  }
  const auto prot = t2_protocol();
  const auto fit = pixelwise_fit(model_forward(x, prot), prot);
  for (std::size_t v = 0; v < g.voxels(); ++v) {
    EXPECT_NEAR(1.0 / fit.r()[v], 100.0, 1e-6 * 100.0);
    EXPECT_NEAR(fit.mx()[v], 0.8, 1e-10);
    EXPECT_NEAR(fit.my()[v], -0.3, 1e-10);
  }
}

TEST(PixelwiseFit, NoiselessPhantomBothKinds) {
  for (MappingKind kind : {MappingKind::T1, MappingKind::T2}) {
    const auto d = phantom_data(kind, {20, 18});
    const auto fit = pixelwise_fit(model_forward(d.truth, d.prot), d.prot);
    for (std::size_t v = 0; v < d.truth.voxels(); ++v) {
      if (d.truth.r()[v] == 0.0) continue;
      EXPECT_NEAR(fit.r()[v], d.truth.r()[v], 1e-6 * d.truth.r()[v]) << to_string(kind) << " voxel " << v;
      EXPECT_NEAR(fit.mx()[v], d.truth.mx()[v], 1e-6);
      EXPECT_NEAR(fit.my()[v], d.truth.my()[v], 1e-6);
    }
  }
}

TEST(PixelwiseFit, T1SignChangeThroughNullPoint) {
  // TI straddles the null point; a magnitude-only fit could not recover the sign.
  const AcquisitionProtocol prot(MappingKind::T1, {100, 500, 700, 2000});
  ParameterState x({1, 1}, {0.0, 1.0, 1.0 / 900.0});
  const auto fit = pixelwise_fit(model_forward(x, prot), prot);
  EXPECT_NEAR(fit.r()[0], 1.0 / 900.0, 1e-9);
  EXPECT_NEAR(fit.my()[0], 1.0, 1e-6);
}

TEST(PixelwiseFit, ZeroImagesGiveZeroState) {
  const auto prot = t1_protocol();
  const auto fit = pixelwise_fit(SignalImages(prot.contrasts(), {5, 5}), prot);
  for (double v : fit.packed()) EXPECT_EQ(v, 0.0);
}

TEST(PixelwiseFit, BackgroundBelowThresholdIsZeroed) {
  const auto prot = t2_protocol();
  ParameterState x({1, 40});
  for (std::size_t v = 0; v < 40; ++v) {
    x.mx()[v] = 1.0;
    x.r()[v] = 0.01;
  }
  x.mx()[7] = 1e-6;
  const auto fit = pixelwise_fit(model_forward(x, prot), prot);
  EXPECT_EQ(fit.r()[7], 0.0);
  EXPECT_EQ(fit.mx()[7], 0.0);
  EXPECT_GT(fit.r()[8], 0.0);
}

TEST(PixelwiseFit, NeedsTwoContrasts) {
  const AcquisitionProtocol prot(MappingKind::T2, {30});
  EXPECT_THROW(pixelwise_fit(SignalImages(1, {2, 2}), prot), ConfigError);
}

TEST(Seed, FullSamplingNoiselessIsNearExact) {
  const auto d = phantom_data(MappingKind::T2);
  const Grid g = d.truth.grid();
  const auto p = SamplingMask::full(d.prot.contrasts(), g);
  const auto m = Measurement::masked(simulate_kspace(d.truth, d.prot, d.c, 0.0, 1), d.prot, d.c, p);
  const auto seed = seed_from_zero_filled(m);
  EXPECT_LT(nrmse(seed.r(), d.truth.r()), 1e-8);
  EXPECT_TRUE(std::isfinite(objective(seed, m, {})));
}

TEST(Seed, ZeroDataGivesZeroSeed) {
  const auto d = phantom_data(MappingKind::T1, {8, 8}, 2);
  const auto m = Measurement::masked(KSpaceData(5, 2, {8, 8}), d.prot, d.c, SamplingMask::full(5, {8, 8}));
  const auto seed = seed_from_zero_filled(m);
  for (double v : seed.packed()) EXPECT_EQ(v, 0.0);
}

TEST(Seed, PresetObjectivesAreFinite) {
  for (const std::string name : {"t2_desk", "t1_desk"}) {
    const auto p = preset(name);
    const auto e = simulate_experiment(p);
    const auto m = Measurement::masked(e.kspace_full, p.protocol, e.coils, e.mask);
    const auto seed = seed_from_zero_filled(m);
    EXPECT_TRUE(std::isfinite(objective(seed, m, {}))) << name;
    for (double r : seed.r()) {
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
    }
  }
}

TEST(Nrmse, BasicValues) {
  const std::vector<double> ref{1.0, -2.0, 0.0, 3.0};
  EXPECT_EQ(nrmse(ref, ref), 0.0);
  EXPECT_DOUBLE_EQ(nrmse(std::vector<double>(4, 0.0), ref), 1.0);
  // Constant offset on the default roi (|ref| > 0, three voxels).
  std::vector<double> est = ref;
  for (std::size_t i = 0; i < 4; ++i)
    if (ref[i] != 0.0) est[i] += 0.5;
  EXPECT_NEAR(nrmse(est, ref), 0.5 * std::sqrt(3.0) / std::sqrt(14.0), 1e-15);
}

TEST(Nrmse, ExplicitRoiAndComplex) {
  const std::vector<double> ref{1.0, 2.0, 3.0}, est{1.0, 0.0, 3.5};
  const std::vector<std::uint8_t> roi{1, 0, 1};
  EXPECT_NEAR(nrmse(est, ref, std::span<const std::uint8_t>(roi)), 0.5 / std::sqrt(10.0), 1e-15);
  const std::vector<cplx> cr{{1, 1}, {0, 2}}, ce{{1, 0}, {0, 2}};
  EXPECT_NEAR(nrmse(std::span<const cplx>(ce), std::span<const cplx>(cr)), 1.0 / std::sqrt(6.0), 1e-15);
}

TEST(Nrmse, ScaleInvariant) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  std::vector<double> a(50), b(50);
  for (auto& v : a) v = nd(rng);
  for (auto& v : b) v = nd(rng);
  for (double alpha : {-3.0, 1e-4, 7.5}) {
    std::vector<double> sa = a, sb = b;
    for (auto& v : sa) v *= alpha;
    for (auto& v : sb) v *= alpha;
    EXPECT_NEAR(nrmse(sa, sb), nrmse(a, b), 1e-12);
  }
}

TEST(Nrmse, Errors) {
  const std::vector<double> zero(3, 0.0), one(3, 1.0);
  EXPECT_THROW(nrmse(one, zero), DomainError);
  EXPECT_THROW(nrmse(one, std::vector<double>(4, 1.0)), ShapeError);
}

TEST(Metrics, CsvLayout) {
  std::ostringstream os;
  write_metrics_csv(os, {{"t2_desk", "nlcg", 6.0, "R", 0.125, 1.5}});
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "experiment,method,accel,map,nrmse,seconds");
  EXPECT_NE(os.str().find("t2_desk,nlcg,6,R,0.125,1.5"), std::string::npos) << os.str();
}

TEST(Metrics, PercentileInterpolates) {
  const std::vector<double> v{-4.0, 1.0, 2.0, 3.0, 0.0};
  EXPECT_EQ(percentile_abs(v, 0.0), 0.0);
  EXPECT_EQ(percentile_abs(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile_abs(v, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(percentile_abs(v, 0.95), 3.8);
}
