#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qmri/ndarray.hpp"

namespace qmri {

/// ||est - ref|| / ||ref|| over roi voxels. Without a roi, voxels where
/// |ref| > 0 are used.
double nrmse(std::span<const double> est, std::span<const double> ref,
             std::optional<std::span<const std::uint8_t>> roi = std::nullopt);
double nrmse(std::span<const cplx> est, std::span<const cplx> ref,
             std::optional<std::span<const std::uint8_t>> roi = std::nullopt);

/// Value at the given fraction (0..1) of the sorted |values|, linear interpolation.
double percentile_abs(std::span<const double> values, double fraction);

struct MetricRow {
  std::string experiment;
  std::string method;
  double accel = 1.0;
  std::string map;  // "R" or "magnitude"
  double nrmse = 0.0;
  double seconds = 0.0;
};

void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows);

}  // namespace qmri
