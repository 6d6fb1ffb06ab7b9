#include "qmri/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "qmri/error.hpp"

namespace qmri {

namespace {

template <class T>
double nrmse_impl(std::span<const T> est, std::span<const T> ref, std::optional<std::span<const std::uint8_t>> roi) {
  if (est.size() != ref.size()) throw ShapeError("nrmse: estimate and reference sizes differ");
  if (roi && roi->size() != ref.size()) throw ShapeError("nrmse: roi size differs");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const bool in = roi ? (*roi)[i] != 0 : std::abs(ref[i]) > 0.0;
    if (!in) continue;
    num += std::norm(est[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  if (!(den > 0.0)) throw DomainError("nrmse: reference has zero norm on the roi");
  return std::sqrt(num / den);
}

}  // namespace

double nrmse(std::span<const double> est, std::span<const double> ref,
             std::optional<std::span<const std::uint8_t>> roi) {
  return nrmse_impl(est, ref, roi);
}

double nrmse(std::span<const cplx> est, std::span<const cplx> ref, std::optional<std::span<const std::uint8_t>> roi) {
  return nrmse_impl(est, ref, roi);
}

double percentile_abs(std::span<const double> values, double fraction) {
  if (values.empty()) return 0.0;
  std::vector<double> a(values.size());
  std::transform(values.begin(), values.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end());
  const double pos = std::clamp(fraction, 0.0, 1.0) * static_cast<double>(a.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, a.size() - 1);
  return a[lo] + (pos - static_cast<double>(lo)) * (a[hi] - a[lo]);
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows) {
  os << "experiment,method,accel,map,nrmse,seconds\n";
  const auto flags = os.flags();
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.method << ',' << std::setprecision(6) << r.accel << ',' << r.map << ','
       << std::setprecision(17) << r.nrmse << ',' << std::setprecision(6) << r.seconds << '\n';
  }
  os.flags(flags);
}

}  // namespace qmri
