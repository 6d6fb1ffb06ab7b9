#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmri/simulate.hpp"

namespace qmri {

/// A complete simulated acquisition setup.
struct ExperimentPreset {
  std::string name;
  PhantomSpec phantom;
  AcquisitionProtocol protocol;
  std::size_t coils = 8;
  MaskSpec mask;
  double snr_db = 30.0;  // data-domain SNR; infinite means noiseless
  std::uint64_t noise_seed = 1;
};

/// t2_desk, t2_full, t1_desk, t1_full.
ExperimentPreset preset(const std::string& name);
std::vector<std::string> preset_names();

/// Six-ellipse head-like phantom; T values are T2 or T1 according to kind.
PhantomSpec head_phantom(Grid grid, MappingKind kind);

AcquisitionProtocol t2_protocol();  // 8 echoes, TE 23..184 ms
AcquisitionProtocol t1_protocol();  // TI {35, 200, 800, 1500, 3000} ms

struct SimulatedExperiment {
  Phantom phantom;
  CoilMaps coils;
  SamplingMask mask;
  KSpaceData kspace_full;
  KSpaceData kspace;  // kspace_full under the mask
  double noise_sigma = 0.0;
};

SimulatedExperiment simulate_experiment(const ExperimentPreset& p);

}  // namespace qmri
