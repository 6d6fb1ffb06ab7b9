#include "qmri/presets.hpp"

#include <cmath>
#include <limits>

#include "qmri/encoding.hpp"

namespace qmri {

AcquisitionProtocol t2_protocol() {
  std::vector<double> te;
  for (int i = 1; i <= 8; ++i) te.push_back(23.0 * i);
  return AcquisitionProtocol(MappingKind::T2, te);
}

AcquisitionProtocol t1_protocol() { return AcquisitionProtocol(MappingKind::T1, {35.0, 200.0, 800.0, 1500.0, 3000.0}); }

PhantomSpec head_phantom(Grid grid, MappingKind kind) {
  struct Tissue {
    double cx, cy, ax, ay, rot, mag, phase, t2, t1;
  };
  // scalp, parenchyma, two ventricles, cortex-like band, lesion
  static constexpr Tissue kTissues[] = {
      {0.00, 0.00, 0.72, 0.90, 0.0, 0.80, 0.30, 50.0, 400.0},
      {0.00, -0.02, 0.62, 0.80, 0.0, 0.90, 0.30, 80.0, 850.0},
      {-0.20, 0.05, 0.11, 0.30, -18.0, 1.00, 0.30, 300.0, 2500.0},
      {0.20, 0.05, 0.11, 0.30, 18.0, 1.00, 0.30, 250.0, 2200.0},
      {0.00, 0.50, 0.30, 0.14, 0.0, 0.85, 0.30, 110.0, 1300.0},
      {0.12, -0.50, 0.14, 0.11, 30.0, 0.95, 0.30, 150.0, 1600.0},
  };
  PhantomSpec spec;
  spec.grid = grid;
  spec.kind = kind;
  for (const auto& t : kTissues) {
    spec.ellipses.push_back(
        {t.cx, t.cy, t.ax, t.ay, t.rot, std::polar(t.mag, t.phase), kind == MappingKind::T2 ? t.t2 : t.t1});
  }
  return spec;
}

std::vector<std::string> preset_names() { return {"t2_desk", "t2_full", "t1_desk", "t1_full"}; }

ExperimentPreset preset(const std::string& name) {
  // Grids are (ny, nx) with ny the phase-encode axis.
  const Grid desk{52, 64}, full{208, 256};
  ExperimentPreset p;
  p.name = name;
  if (name == "t2_desk" || name == "t2_full") {
    const bool d = name == "t2_desk";
    p.phantom = head_phantom(d ? desk : full, MappingKind::T2);
    p.protocol = t2_protocol();
    p.mask = {4, d ? 8u : 24u, MaskScheme::equispaced, 0, false};
  } else if (name == "t1_desk" || name == "t1_full") {
    p.phantom = head_phantom(name == "t1_desk" ? desk : full, MappingKind::T1);
    p.protocol = t1_protocol();
    p.mask = {4, 0, MaskScheme::equispaced, 0, false};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  p.coils = 8;
  p.snr_db = 30.0;
  p.noise_seed = 1;
  return p;
}

SimulatedExperiment simulate_experiment(const ExperimentPreset& p) {
  SimulatedExperiment e;
  e.phantom = make_phantom(p.phantom);
  e.coils = make_coil_maps(p.coils, p.phantom.grid);
  e.mask = make_mask(p.mask, p.phantom.grid, p.protocol.contrasts());
  if (std::isfinite(p.snr_db)) {
    const KSpaceData clean = simulate_kspace(e.phantom.truth, p.protocol, e.coils, 0.0, p.noise_seed);
    e.noise_sigma = noise_sigma_for_snr(clean, p.snr_db);
  }
  e.kspace_full = simulate_kspace(e.phantom.truth, p.protocol, e.coils, e.noise_sigma, p.noise_seed);
  e.kspace = apply_mask(e.kspace_full, e.mask);
  return e;
}

}  // namespace qmri
