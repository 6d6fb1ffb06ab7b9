#include "qmri/types.hpp"

#include <algorithm>
#include <cmath>

namespace qmri {

std::string to_string(MappingKind kind) { return kind == MappingKind::T1 ? "T1" : "T2"; }

MappingKind parse_mapping_kind(const std::string& s) {
  if (s == "T1") return MappingKind::T1;
  if (s == "T2") return MappingKind::T2;
  throw ConfigError("unknown mapping kind '" + s + "' (expected T1 or T2)");
}

AcquisitionProtocol::AcquisitionProtocol(MappingKind k, std::vector<double> times)
    : kind(k), times_ms(std::move(times)) {
  if (times_ms.empty()) throw ConfigError("protocol times must be nonempty");
  for (std::size_t i = 0; i < times_ms.size(); ++i) {
    if (!(times_ms[i] > 0.0) || !std::isfinite(times_ms[i])) {
      throw ConfigError("protocol times must be finite and positive");
    }
    if (i > 0 && !(times_ms[i] > times_ms[i - 1])) {
      throw ConfigError("protocol times must be strictly increasing");
    }
  }
}

ParameterState::ParameterState(Grid grid) : grid_(grid), data_(kChannels * grid.voxels(), 0.0) {}

ParameterState::ParameterState(Grid grid, std::vector<double> packed) : grid_(grid), data_(std::move(packed)) {
  if (data_.size() != kChannels * grid_.voxels()) {
    throw ShapeError("parameter state needs 3*ny*nx values");
  }
}

ParameterState ParameterState::from_array(const RealArray& a) {
  if (a.rank() != 3 || a.extent(0) != kChannels) {
    throw ShapeError("parameter state tensor must have shape (3, ny, nx), got " + shape_string(a.shape()));
  }
  return ParameterState({a.extent(1), a.extent(2)}, std::vector<double>(a.values().begin(), a.values().end()));
}

RealArray ParameterState::to_array() const { return RealArray({kChannels, grid_.ny, grid_.nx}, data_); }

std::vector<double> ParameterState::magnitude() const {
  std::vector<double> out(voxels());
  auto x = mx();
  auto y = my();
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = std::hypot(x[v], y[v]);
  return out;
}

bool ParameterState::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

SignalImages::SignalImages(ComplexArray a) : images(std::move(a)) {
  if (images.rank() != 3) throw ShapeError("signal images must have shape (n_contrast, ny, nx)");
}

SignalImages::SignalImages(std::size_t contrasts, Grid grid) : images({contrasts, grid.ny, grid.nx}) {}

KSpaceData::KSpaceData(ComplexArray a) : samples(std::move(a)) {
  if (samples.rank() != 4) throw ShapeError("k-space must have shape (n_contrast, n_coil, ny, nx)");
}

KSpaceData::KSpaceData(std::size_t contrasts, std::size_t coils, Grid grid)
    : samples({contrasts, coils, grid.ny, grid.nx}) {}

CoilMaps::CoilMaps(ComplexArray a) : maps(std::move(a)) {
  if (maps.rank() != 3 || maps.extent(0) == 0) throw ShapeError("coil maps must have shape (n_coil, ny, nx)");
}

SamplingMask::SamplingMask(BoolArray a) : pattern(std::move(a)) {
  if (pattern.rank() != 3) throw ShapeError("sampling mask must have shape (n_contrast, ny, nx)");
}

SamplingMask SamplingMask::full(std::size_t contrasts, Grid grid) {
  return SamplingMask(BoolArray({contrasts, grid.ny, grid.nx}, 1));
}

std::size_t SamplingMask::count(std::size_t contrast) const {
  auto s = pattern.slab(contrast);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
}

void check_same_grid(Grid a, Grid b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": grid mismatch (" + std::to_string(a.ny) + "x" + std::to_string(a.nx) +
                     " vs " + std::to_string(b.ny) + "x" + std::to_string(b.nx) + ")");
  }
}

void validate_coil_maps(const CoilMaps& c) {
  const std::size_t n = c.grid().voxels();
  for (std::size_t v = 0; v < n; ++v) {
    double ss = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < c.coils(); ++j) {
      const cplx z = c.maps[j * n + v];
      any = any || z != cplx{};
      ss += std::norm(z);
    }
    if (any && !(ss > 0.0)) throw DomainError("coil maps have zero sum-of-squares at an active voxel");
  }
}

void validate_mask(const SamplingMask& p) {
  for (std::size_t k = 0; k < p.contrasts(); ++k) {
    if (p.count(k) == 0) throw DomainError("sampling mask has no samples in contrast " + std::to_string(k));
  }
}

}  // namespace qmri
