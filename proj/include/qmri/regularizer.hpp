#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qmri/objective.hpp"
#include "qmri/types.hpp"

namespace qmri {

struct RegularizerContext {
  MappingKind kind = MappingKind::T2;
  ChannelScaling scaling;
};

/// z = R(x) on channel-scaled parameter states. Output has the input's shape.
class Regularizer {
 public:
  virtual ~Regularizer() = default;
  virtual ParameterState apply(const ParameterState& scaled, const RegularizerContext& ctx) = 0;
  virtual std::string name() const = 0;
};

struct RegularizerSpec {
  std::string name = "identity";  // identity | gaussian_smooth | tv_denoise | external
  double sigma = 1.0;             // gaussian_smooth, voxels
  double weight = 0.03;           // tv_denoise
  int iters = 100;                // tv_denoise
  std::vector<std::string> command;  // external: argv prefix; the workdir is appended
  std::filesystem::path workdir;
  std::chrono::milliseconds timeout{300'000};
};

std::unique_ptr<Regularizer> builtin_regularizer(const RegularizerSpec& spec);

/// Out-of-process regularizer. Each call writes <workdir>/x_in.qmrt and
/// <workdir>/meta.json, runs `command... workdir`, and reads <workdir>/z_out.qmrt.
std::unique_ptr<Regularizer> external_regularizer(std::vector<std::string> command, std::filesystem::path workdir,
                                                  std::chrono::milliseconds timeout = std::chrono::seconds(300));

/// Builtin or external, by spec.name.
std::unique_ptr<Regularizer> make_regularizer(const RegularizerSpec& spec);

// Single-image filters used by the builtin regularizers, on (ny, nx) row-major data.
std::vector<double> gaussian_smooth(std::span<const double> image, Grid grid, double sigma);
std::vector<double> tv_denoise(std::span<const double> image, Grid grid, double weight, int iters);
// Isotropic total variation with forward differences.
double total_variation(std::span<const double> image, Grid grid);

}  // namespace qmri
