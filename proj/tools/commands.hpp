#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"

namespace qmri::cli {

void cmd_simulate(const Config& cfg);
void cmd_mask(const Config& cfg);
void cmd_recon(const Config& cfg);
void cmd_fit(const Config& cfg);
void cmd_split(const Config& cfg);

struct MetricsArgs {
  std::filesystem::path est_dir;
  std::filesystem::path truth_dir;
  std::string roi = "nonzero";  // nonzero | tissue | all
  std::optional<std::filesystem::path> output;
  std::string experiment;
};
void cmd_metrics(const MetricsArgs& args);

}  // namespace qmri::cli
