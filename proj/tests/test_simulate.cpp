#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "qmri/encoding.hpp"
#include "qmri/objective.hpp"
#include "qmri/presets.hpp"
#include "qmri/simulate.hpp"
#include "qmri/tensor_io.hpp"

using namespace qmri;

namespace {

std::set<std::size_t> sampled_line_set(const SamplingMask& p, std::size_t k) {
  std::set<std::size_t> lines;
  const Grid g = p.grid();
  for (std::size_t y = 0; y < g.ny; ++y)
    for (std::size_t x = 0; x < g.nx; ++x)
      if (p.pattern[(k * g.ny + y) * g.nx + x]) lines.insert(y);
  return lines;
}

std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Phantom, FullFieldEllipse) {
  PhantomSpec spec;
  spec.grid = {16, 16};
  spec.ellipses.push_back({0.0, 0.0, 1.0, 1.0, 0.0, {1.0, 0.0}, 100.0});
  const auto ph = make_phantom(spec);
  std::size_t inside = 0;
  for (std::size_t v = 0; v < 256; ++v) {
    if (!ph.tissue[v]) {
      EXPECT_EQ(ph.truth.r()[v], 0.0);
      continue;
    }
    ++inside;
    EXPECT_EQ(ph.truth.r()[v], 0.01);
    EXPECT_EQ(ph.truth.mx()[v], 1.0);
    EXPECT_EQ(ph.truth.my()[v], 0.0);
  }
  EXPECT_GT(inside, 150u);  // pi/4 of the field
}

TEST(Phantom, EmptySpecIsZero) {
  PhantomSpec spec;
  spec.grid = {8, 9};
  const auto ph = make_phantom(spec);
  for (double v : ph.truth.packed()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(ph.tissue.extent(0), 0u);
}

TEST(Phantom, LaterEllipsesOverwrite) {
  PhantomSpec spec;
  spec.grid = {20, 20};
  spec.ellipses.push_back({0.0, 0.0, 0.8, 0.8, 0.0, {1.0, 0.0}, 100.0});
  spec.ellipses.push_back({0.0, 0.0, 0.3, 0.3, 0.0, {0.0, 2.0}, 50.0});
  const auto ph = make_phantom(spec);
  const std::size_t center = 10 * 20 + 10;
  EXPECT_EQ(ph.truth.r()[center], 0.02);
  EXPECT_EQ(ph.truth.my()[center], 2.0);
  EXPECT_FALSE(ph.tissue[center]);
  EXPECT_TRUE(ph.tissue[400 + center]);
  for (std::size_t v = 0; v < 400; ++v) EXPECT_LE(ph.tissue[v] + ph.tissue[400 + v], 1);
}

TEST(Phantom, BackgroundRate) {
  PhantomSpec spec;
  spec.grid = {6, 6};
  spec.background_t_ms = 500.0;
  spec.ellipses.push_back({0.0, 0.0, 0.2, 0.2, 0.0, {1.0, 0.0}, 100.0});
  const auto ph = make_phantom(spec);
  EXPECT_EQ(ph.truth.r()[0], 1.0 / 500.0);
}

TEST(Phantom, InvalidSpecs) {
  PhantomSpec spec;
  spec.grid = {8, 8};
  spec.ellipses.push_back({0.0, 0.0, 0.5, 0.5, 0.0, {1.0, 0.0}, -3.0});
  EXPECT_THROW(make_phantom(spec), ConfigError);
  spec.ellipses[0].t_ms = 10.0;
  spec.ellipses[0].cx = 1.5;
  EXPECT_THROW(make_phantom(spec), ConfigError);
}

TEST(Phantom, HeadPresetSpansTissueRange) {
  const auto spec = head_phantom({52, 64}, MappingKind::T2);
  ASSERT_EQ(spec.ellipses.size(), 6u);
  double lo = 1e9, hi = 0.0;
  for (const auto& e : spec.ellipses) {
    lo = std::min(lo, e.t_ms);
    hi = std::max(hi, e.t_ms);
  }
  EXPECT_EQ(lo, 50.0);
  EXPECT_EQ(hi, 300.0);
}

TEST(CoilMaps, SingleCoilHasUnitMagnitude) {
  const auto c = make_coil_maps(1, {12, 10});
  for (const auto& z : c.maps.values()) EXPECT_NEAR(std::abs(z), 1.0, 1e-12);
}

TEST(CoilMaps, UnitSumOfSquares) {
  const Grid g{52, 64};
  const auto c = make_coil_maps(8, g);
  for (std::size_t v = 0; v < g.voxels(); ++v) {
    double s = 0.0;
    for (std::size_t j = 0; j < 8; ++j) s += std::norm(c.maps[j * g.voxels() + v]);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(CoilMaps, FourCoilsAreDistinct) {
  const Grid g{52, 64};
  const auto c = make_coil_maps(4, g);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) {
      double d = 0.0, na = 0.0;
      for (std::size_t v = 0; v < g.voxels(); ++v) {
        d += std::norm(c.maps[a * g.voxels() + v] - c.maps[b * g.voxels() + v]);
        na += std::norm(c.maps[a * g.voxels() + v]);
      }
      EXPECT_GT(std::sqrt(d / na), 0.1) << a << " vs " << b;
    }
}

TEST(Mask, EquispacedLineCounts) {
  const Grid g{208, 16};
  MaskSpec ms;
  ms.accel = 4;
  auto p = make_mask(ms, g, 2);
  EXPECT_EQ(sampled_lines(p, 0), 52u);
  EXPECT_EQ(net_acceleration(p), 4.0);

  ms.acs_width = 24;
  p = make_mask(ms, g, 2);
  std::set<std::size_t> want;
  for (std::size_t y = 0; y < 208; y += 4) want.insert(y);
  for (std::size_t y = 92; y < 116; ++y) want.insert(y);
  EXPECT_EQ(want.size(), 70u);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(sampled_line_set(p, k), want);
  EXPECT_EQ(sampled_lines(p, 1), 70u);
  EXPECT_DOUBLE_EQ(net_acceleration(p), 208.0 / 70.0);
  // kx fully sampled on every kept line
  EXPECT_EQ(p.count(0), 70u * 16u);
}

TEST(Mask, AccelOneIsFull) {
  MaskSpec ms;
  ms.accel = 1;
  ms.acs_width = 10;
  const auto p = make_mask(ms, {30, 7}, 3);
  for (auto b : p.pattern.values()) EXPECT_EQ(b, 1);
}

TEST(Mask, InvalidSpecs) {
  MaskSpec ms;
  ms.accel = 0;
  EXPECT_THROW(make_mask(ms, {16, 16}, 1), ConfigError);
  ms.accel = 2;
  ms.acs_width = 17;
  EXPECT_THROW(make_mask(ms, {16, 16}, 1), ConfigError);
  EXPECT_THROW(parse_mask_scheme("poisson"), ConfigError);
}

TEST(Mask, UniformRandom) {
  const Grid g{64, 8};
  MaskSpec ms;
  ms.accel = 5;
  ms.scheme = MaskScheme::uniform_random;
  ms.seed = 17;
  const auto a = make_mask(ms, g, 3);
  EXPECT_EQ(sampled_lines(a, 0), 13u);  // ceil(64 / 5)
  EXPECT_EQ(a.pattern, make_mask(ms, g, 3).pattern);
  EXPECT_EQ(sampled_line_set(a, 0), sampled_line_set(a, 2));
  ms.per_contrast = true;
  const auto b = make_mask(ms, g, 3);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(sampled_lines(b, k), 13u);
  EXPECT_NE(sampled_line_set(b, 0), sampled_line_set(b, 1));
  ms.seed = 18;
  ms.per_contrast = false;
  EXPECT_NE(make_mask(ms, g, 3).pattern, a.pattern);
}

TEST(SimulateKspace, NoiselessEqualsEncode) {
  const Grid g{16, 12};
  const auto x = make_phantom(head_phantom(g, MappingKind::T1)).truth;
  const auto prot = t1_protocol();
  const auto c = make_coil_maps(3, g);
  const auto y = simulate_kspace(x, prot, c, 0.0, 5);
  EXPECT_EQ(y.samples, encode(x, prot, c, SamplingMask::full(prot.contrasts(), g)).samples);
}

TEST(SimulateKspace, SeededNoiseIsReproducible) {
  const Grid g{16, 12};
  const auto x = make_phantom(head_phantom(g, MappingKind::T2)).truth;
  const auto c = make_coil_maps(2, g);
  const auto a = simulate_kspace(x, t2_protocol(), c, 0.1, 9);
  EXPECT_EQ(a.samples, simulate_kspace(x, t2_protocol(), c, 0.1, 9).samples);
  EXPECT_NE(a.samples, simulate_kspace(x, t2_protocol(), c, 0.1, 10).samples);
}

TEST(SimulateKspace, NoiseStandardDeviation) {
  const Grid g{64, 64};
  const ParameterState empty(g);
  const auto y = simulate_kspace(empty, t2_protocol(), make_coil_maps(1, g), 0.25, 21);
  double sr = 0.0, si = 0.0, mr = 0.0, mi = 0.0;
  const auto n = static_cast<double>(y.samples.size());
  for (const auto& z : y.samples.values()) {
    mr += z.real();
    mi += z.imag();
  }
  mr /= n;
  mi /= n;
  for (const auto& z : y.samples.values()) {
    sr += (z.real() - mr) * (z.real() - mr);
    si += (z.imag() - mi) * (z.imag() - mi);
  }
  EXPECT_NEAR(std::sqrt(sr / (n - 1)), 0.25, 0.05 * 0.25);
  EXPECT_NEAR(std::sqrt(si / (n - 1)), 0.25, 0.05 * 0.25);
}

TEST(SimulateKspace, NoiseSigmaForSnr) {
  KSpaceData clean(ComplexArray({1, 1, 2, 2}, std::vector<cplx>(4, cplx(3.0, 4.0))));  // rms 5
  EXPECT_NEAR(noise_sigma_for_snr(clean, 20.0), 5.0 / (10.0 * std::sqrt(2.0)), 1e-15);
}

TEST(SimulateKspace, NoiselessDataIsInRange) {
  const Grid g{20, 16};
  const auto x = make_phantom(head_phantom(g, MappingKind::T2)).truth;
  const auto prot = t2_protocol();
  const auto c = make_coil_maps(4, g);
  MaskSpec ms;
  ms.accel = 3;
  ms.acs_width = 4;
  const auto p = make_mask(ms, g, prot.contrasts());
  const auto m = Measurement::masked(simulate_kspace(x, prot, c, 0.0, 1), prot, c, p);
  const auto grad = gradient(x, m, {});
  for (double v : grad.packed()) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(Split, FortyPercentOfHundred) {
  // 10 non-ACS lines of 10 samples plus a 4-line ACS block.
  const Grid g{20, 10};
  BoolArray a({1, 20, 10});
  for (std::size_t y : {0, 1, 2, 3, 4, 6, 12, 14, 16, 18, 8, 9, 10, 11})
    for (std::size_t x = 0; x < 10; ++x) a[y * 10 + x] = 1;
  const SamplingMask p(std::move(a));
  const auto s = split_mask(p, 4, 0.4, 123);
  EXPECT_EQ(s.loss.count(0), 40u);
  EXPECT_EQ(s.train.count(0), 100u);
  const auto again = split_mask(p, 4, 0.4, 123);
  EXPECT_EQ(again.loss.pattern, s.loss.pattern);
  EXPECT_NE(split_mask(p, 4, 0.4, 124).loss.pattern, s.loss.pattern);
}

TEST(Split, PartitionPropertiesAcrossSeeds) {
  const Grid g{52, 64};
  MaskSpec ms;
  ms.accel = 4;
  ms.acs_width = 8;
  ms.scheme = MaskScheme::uniform_random;
  ms.per_contrast = true;
  const auto p = make_mask(ms, g, 3);
  const std::size_t a0 = acs_start(g.ny, 8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = split_mask(p, 8, 0.4, seed);
    for (std::size_t i = 0; i < p.pattern.size(); ++i) {
      EXPECT_EQ(s.train.pattern[i] | s.loss.pattern[i], p.pattern[i]);
      EXPECT_FALSE(s.train.pattern[i] && s.loss.pattern[i]);
      const std::size_t y = (i / g.nx) % g.ny;
      if (y >= a0 && y < a0 + 8) EXPECT_FALSE(s.loss.pattern[i]);
      if (y >= a0 && y < a0 + 8 && p.pattern[i]) EXPECT_TRUE(s.train.pattern[i]);
    }
  }
}

TEST(Split, Errors) {
  MaskSpec ms;
  ms.accel = 1;
  const auto full = make_mask(ms, {8, 8}, 1);
  EXPECT_THROW(split_mask(full, 8, 0.4, 1), DomainError);  // everything is ACS
  EXPECT_THROW(split_mask(full, 2, 0.0, 1), ConfigError);
  EXPECT_THROW(split_mask(full, 2, 1.0, 1), ConfigError);
}

TEST(Presets, T2DeskShape) {
  const auto p = preset("t2_desk");
  EXPECT_EQ(p.phantom.grid, (Grid{52, 64}));
  EXPECT_EQ(p.protocol.contrasts(), 8u);
  EXPECT_EQ(p.protocol.times_ms.front(), 23.0);
  EXPECT_EQ(p.protocol.times_ms.back(), 184.0);
  EXPECT_EQ(p.coils, 8u);
  EXPECT_EQ(preset("t2_full").phantom.grid, (Grid{208, 256}));
  EXPECT_EQ(preset("t2_full").mask.acs_width, 24u);
  EXPECT_EQ(preset("t1_desk").protocol.times_ms, (std::vector<double>{35, 200, 800, 1500, 3000}));
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Presets, MatchCommittedFiles) {
  for (const std::string name : {"t2_desk", "t1_desk"}) {
    const auto dir = std::filesystem::path(QMRI_DATA_DIR) / "presets" / name;
    const auto e = simulate_experiment(preset(name));
    EXPECT_EQ(encode_tensor(e.phantom.truth.to_array()), file_bytes(dir / "truth.qmrt")) << name;
    EXPECT_EQ(encode_tensor(e.phantom.tissue), file_bytes(dir / "tissue.qmrt")) << name;
    EXPECT_EQ(encode_tensor(e.coils.maps), file_bytes(dir / "coils.qmrt")) << name;
    EXPECT_EQ(encode_tensor(e.mask.pattern), file_bytes(dir / "mask.qmrt")) << name;
  }
}
