#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qmri/parallel.hpp"

using namespace qmri;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kBridge = 4 };

struct ConfigArgs {
  std::string path;
  std::vector<std::string> sets;
};

void add_config_args(CLI::App* cmd, ConfigArgs& a) {
  cmd->add_option("config", a.path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", a.sets, "override a config key, key=value (repeatable)");
}

cli::Config build_config(const ConfigArgs& a) {
  auto cfg = cli::Config::load(a.path.empty() ? std::nullopt : std::optional<std::filesystem::path>(a.path));
  for (const auto& s : a.sets) cfg.apply_set(s);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-based T1/T2 mapping from undersampled multi-coil k-space"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: QMRI_THREADS or all cores)");

  ConfigArgs sim, mask, recon, fit, split;
  add_config_args(app.add_subcommand("simulate", "simulate a phantom acquisition"), sim);
  add_config_args(app.add_subcommand("mask", "generate a sampling mask"), mask);
  add_config_args(app.add_subcommand("recon", "reconstruct parameter maps"), recon);
  add_config_args(app.add_subcommand("fit", "pixelwise fit of reconstructed images"), fit);
  add_config_args(app.add_subcommand("split", "split a mask into train and loss masks"), split);

  cli::MetricsArgs met;
  std::string met_out;
  auto* metrics = app.add_subcommand("metrics", "NRMSE of an estimate against ground truth");
  metrics->add_option("--est", met.est_dir, "directory with params.qmrt")->required();
  metrics->add_option("--truth", met.truth_dir, "directory with truth.qmrt")->required();
  metrics->add_option("--roi", met.roi, "nonzero | tissue | all")->capture_default_str();
  metrics->add_option("--experiment", met.experiment, "experiment label (default: truth dir name)");
  metrics->add_option("-o,--output", met_out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    set_num_threads(threads > 0 ? threads : threads_from_env());
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "simulate") cli::cmd_simulate(build_config(sim));
    else if (name == "mask") cli::cmd_mask(build_config(mask));
    else if (name == "recon") cli::cmd_recon(build_config(recon));
    else if (name == "fit") cli::cmd_fit(build_config(fit));
    else if (name == "split") cli::cmd_split(build_config(split));
    else {
      if (!met_out.empty()) met.output = met_out;
      cli::cmd_metrics(met);
    }
  } catch (const BridgeError& e) {
    std::cerr << "qmri: bridge error: " << e.what() << '\n';
    return kBridge;
  } catch (const NumericalError& e) {
    std::cerr << "qmri: numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "qmri: " << e.what() << '\n';
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "qmri: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "qmri: internal error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
