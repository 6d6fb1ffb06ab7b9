#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qmri/ndarray.hpp"

namespace qmri {

enum class MappingKind { T1, T2 };

std::string to_string(MappingKind kind);
MappingKind parse_mapping_kind(const std::string& s);

struct Grid {
  std::size_t ny = 0;
  std::size_t nx = 0;
  std::size_t voxels() const { return ny * nx; }
  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Mapping kind plus echo (T2) or inversion (T1) times in milliseconds.
struct AcquisitionProtocol {
  MappingKind kind = MappingKind::T2;
  std::vector<double> times_ms;

  AcquisitionProtocol() = default;
  AcquisitionProtocol(MappingKind k, std::vector<double> times);

  std::size_t contrasts() const { return times_ms.size(); }
};

enum class Channel : std::size_t { mx = 0, my = 1, r = 2 };
inline constexpr std::size_t kChannels = 3;

/// Per-voxel (Mx, My, R) with R in 1/ms. Stored channel-major as one
/// contiguous (3, ny, nx) block so the solver can treat it as a flat vector.
class ParameterState {
 public:
  ParameterState() = default;
  explicit ParameterState(Grid grid);
  ParameterState(Grid grid, std::vector<double> packed);

  static ParameterState from_array(const RealArray& a);
  RealArray to_array() const;

  const Grid& grid() const { return grid_; }
  std::size_t voxels() const { return grid_.voxels(); }

  std::span<double> channel(Channel c) {
    return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * voxels(), voxels());
  }
  std::span<const double> channel(Channel c) const {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * voxels(), voxels());
  }
  std::span<double> mx() { return channel(Channel::mx); }
  std::span<double> my() { return channel(Channel::my); }
  std::span<double> r() { return channel(Channel::r); }
  std::span<const double> mx() const { return channel(Channel::mx); }
  std::span<const double> my() const { return channel(Channel::my); }
  std::span<const double> r() const { return channel(Channel::r); }

  std::span<double> packed() { return data_; }
  std::span<const double> packed() const { return data_; }

  // |Mx + i My| per voxel.
  std::vector<double> magnitude() const;
  bool all_finite() const;

  friend bool operator==(const ParameterState&, const ParameterState&) = default;

 private:
  Grid grid_;
  std::vector<double> data_;
};

/// Model-predicted transverse signal, shape (n_contrast, ny, nx).
struct SignalImages {
  ComplexArray images;

  SignalImages() = default;
  explicit SignalImages(ComplexArray a);
  SignalImages(std::size_t contrasts, Grid grid);

  std::size_t contrasts() const { return images.extent(0); }
  Grid grid() const { return {images.extent(1), images.extent(2)}; }
};

/// Complex k-space, shape (n_contrast, n_coil, ny, nx).
struct KSpaceData {
  ComplexArray samples;

  KSpaceData() = default;
  explicit KSpaceData(ComplexArray a);
  KSpaceData(std::size_t contrasts, std::size_t coils, Grid grid);

  std::size_t contrasts() const { return samples.extent(0); }
  std::size_t coils() const { return samples.extent(1); }
  Grid grid() const { return {samples.extent(2), samples.extent(3)}; }
};

/// Complex coil sensitivities, shape (n_coil, ny, nx).
struct CoilMaps {
  ComplexArray maps;

  CoilMaps() = default;
  explicit CoilMaps(ComplexArray a);

  std::size_t coils() const { return maps.extent(0); }
  Grid grid() const { return {maps.extent(1), maps.extent(2)}; }
};

/// Boolean sampling pattern per contrast, shape (n_contrast, ny, nx).
/// Broadcast across coils.
struct SamplingMask {
  BoolArray pattern;

  SamplingMask() = default;
  explicit SamplingMask(BoolArray a);
  static SamplingMask full(std::size_t contrasts, Grid grid);

  std::size_t contrasts() const { return pattern.extent(0); }
  Grid grid() const { return {pattern.extent(1), pattern.extent(2)}; }
  std::size_t count(std::size_t contrast) const;
};

void check_same_grid(Grid a, Grid b, const char* what);
void validate_coil_maps(const CoilMaps& c);
void validate_mask(const SamplingMask& p);

}  // namespace qmri
