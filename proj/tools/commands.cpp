#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "qmri/baselines.hpp"
#include "qmri/encoding.hpp"
#include "qmri/metrics.hpp"
#include "qmri/presets.hpp"
#include "qmri/simulate.hpp"
#include "qmri/tensor_io.hpp"
#include "qmri/unroll.hpp"

namespace qmri::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const Config& cfg) {
  const fs::path out = cfg.require<std::string>("output");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return j;
}

json protocol_json(const AcquisitionProtocol& p) { return {{"kind", to_string(p.kind)}, {"times_ms", p.times_ms}}; }

AcquisitionProtocol parse_protocol(const Config& c) {
  c.only({"kind", "times_ms"});
  return AcquisitionProtocol(parse_mapping_kind(c.require<std::string>("kind")),
                             c.require<std::vector<double>>("times_ms"));
}

Grid parse_grid(const Config& c, const std::string& key, Grid fallback) {
  if (!c.has(key)) return fallback;
  const auto v = c.require<std::vector<std::size_t>>(key);
  if (v.size() != 2 || v[0] == 0 || v[1] == 0) throw ConfigError(c.key_path(key) + ": expected [ny, nx], both >= 1");
  return {v[0], v[1]};
}

MaskSpec parse_mask(const Config& c, MaskSpec m) {
  c.only({"accel", "acs_width", "scheme", "seed", "per_contrast"});
  m.accel = c.count("accel", m.accel);
  m.acs_width = c.count("acs_width", m.acs_width);
  if (c.has("scheme")) m.scheme = parse_mask_scheme(c.require<std::string>("scheme"));
  m.seed = c.get<std::uint64_t>("seed", m.seed);
  m.per_contrast = c.get<bool>("per_contrast", m.per_contrast);
  return m;
}

json mask_json(const MaskSpec& m, const SamplingMask& p) {
  json lines = json::array();
  for (std::size_t k = 0; k < p.contrasts(); ++k) lines.push_back(sampled_lines(p, k));
  return {{"accel", m.accel},
          {"acs_width", m.acs_width},
          {"scheme", to_string(m.scheme)},
          {"seed", m.seed},
          {"per_contrast", m.per_contrast},
          {"sampled_lines", lines},
          {"net_acceleration", net_acceleration(p)}};
}

PhantomSpec parse_phantom(const Config& c, PhantomSpec spec) {
  c.only({"ellipses", "background_t_ms"});
  spec.background_t_ms = c.get<double>("background_t_ms", spec.background_t_ms);
  if (c.has("ellipses")) {
    spec.ellipses.clear();
    const auto& arr = c.raw("ellipses");
    if (!arr.is_array()) throw ConfigError(c.key_path("ellipses") + ": expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Config e(arr[i], c.key_path("ellipses") + "[" + std::to_string(i) + "]");
      e.only({"center", "axes", "rotation_deg", "magnetization", "t_ms"});
      Ellipse el;
      const auto center = e.get<std::vector<double>>("center", {0.0, 0.0});
      const auto axes = e.get<std::vector<double>>("axes", {0.5, 0.5});
      const auto mag = e.get<std::vector<double>>("magnetization", {1.0, 0.0});
      if (center.size() != 2) throw ConfigError(e.key_path("center") + ": expected [x, y]");
      if (axes.size() != 2) throw ConfigError(e.key_path("axes") + ": expected [ax, ay]");
      if (mag.size() != 2) throw ConfigError(e.key_path("magnetization") + ": expected [re, im]");
      el.cx = center[0];
      el.cy = center[1];
      el.ax = axes[0];
      el.ay = axes[1];
      el.rotation_deg = e.get<double>("rotation_deg", 0.0);
      el.magnetization = {mag[0], mag[1]};
      el.t_ms = e.require<double>("t_ms");
      spec.ellipses.push_back(el);
    }
  }
  return spec;
}

json phantom_json(const PhantomSpec& s) {
  json ellipses = json::array();
  for (const auto& e : s.ellipses) {
    ellipses.push_back({{"center", {e.cx, e.cy}},
                        {"axes", {e.ax, e.ay}},
                        {"rotation_deg", e.rotation_deg},
                        {"magnetization", {e.magnetization.real(), e.magnetization.imag()}},
                        {"t_ms", e.t_ms}});
  }
  return {{"ellipses", ellipses}, {"background_t_ms", s.background_t_ms}};
}

ExperimentPreset parse_experiment(const Config& cfg) {
  ExperimentPreset p = preset(cfg.get<std::string>("preset", "t2_desk"));
  const Grid grid = parse_grid(cfg, "grid", p.phantom.grid);
  if (cfg.has("protocol")) p.protocol = parse_protocol(cfg.section("protocol"));
  if (grid != p.phantom.grid || p.protocol.kind != p.phantom.kind) p.phantom = head_phantom(grid, p.protocol.kind);
  p.phantom = parse_phantom(cfg.section("phantom"), p.phantom);
  p.coils = cfg.count("coils", p.coils);
  if (p.coils == 0) throw ConfigError("coils: must be >= 1");
  p.mask = parse_mask(cfg.section("mask"), p.mask);
  if (cfg.has("snr_db")) {
    const auto& v = cfg.raw("snr_db");
    if (v.is_string() && v.get<std::string>() == "inf")
      p.snr_db = std::numeric_limits<double>::infinity();
    else
      p.snr_db = cfg.require<double>("snr_db");
  }
  p.noise_seed = cfg.get<std::uint64_t>("noise_seed", p.noise_seed);
  p.phantom.validate();
  p.mask.validate(grid);
  return p;
}

struct LoadedInput {
  Measurement m;
  json manifest;
};

LoadedInput load_input(const Config& cfg) {
  const fs::path in = cfg.require<std::string>("input");
  json manifest = read_json(in / "manifest.json");
  const auto& files = manifest.at("files");
  AcquisitionProtocol prot = cfg.has("protocol") ? parse_protocol(cfg.section("protocol"))
                                                 : AcquisitionProtocol(parse_mapping_kind(manifest.at("protocol").at("kind").get<std::string>()),
                                                                       manifest.at("protocol").at("times_ms").get<std::vector<double>>());
  const fs::path kfile = in / cfg.get<std::string>("kspace", files.at("kspace").get<std::string>());
  const fs::path mfile = in / cfg.get<std::string>("mask", files.at("mask").get<std::string>());
  KSpaceData y(read_complex(kfile));
  CoilMaps c(read_complex(in / files.at("coils").get<std::string>()));
  SamplingMask p(read_bool(mfile));
  return {Measurement::masked(std::move(y), std::move(prot), std::move(c), std::move(p)), std::move(manifest)};
}

NlcgConfig parse_nlcg(const Config& c) {
  c.only({"grad_tol", "armijo_c", "backtrack_factor", "max_backtracks", "initial_step", "step_growth"});
  NlcgConfig n;
  n.grad_tol = c.get<double>("grad_tol", n.grad_tol);
  n.armijo_c = c.get<double>("armijo_c", n.armijo_c);
  n.backtrack_factor = c.get<double>("backtrack_factor", n.backtrack_factor);
  n.max_backtracks = c.get<int>("max_backtracks", n.max_backtracks);
  n.initial_step = c.get<double>("initial_step", n.initial_step);
  n.step_growth = c.get<double>("step_growth", n.step_growth);
  return n;
}

RegularizerSpec parse_regularizer(const Config& c) {
  c.only({"name", "sigma", "weight", "iters", "command", "workdir", "timeout_s"});
  RegularizerSpec r;
  r.name = c.get<std::string>("name", "tv_denoise");
  r.sigma = c.get<double>("sigma", r.sigma);
  r.weight = c.get<double>("weight", r.weight);
  r.iters = c.get<int>("iters", r.iters);
  if (c.has("command")) {
    const auto& v = c.raw("command");
    r.command = v.is_string() ? std::vector<std::string>{v.get<std::string>()} : c.require<std::vector<std::string>>("command");
  }
  r.workdir = c.get<std::string>("workdir", "");
  r.timeout = std::chrono::milliseconds(static_cast<long long>(1000.0 * c.positive("timeout_s", 300.0)));
  return r;
}

json report_json(const NlcgReport& r) {
  return {{"objective_trace", r.objective_trace},
          {"iterations_run", r.iterations_run},
          {"final_grad_norm", r.final_grad_norm},
          {"backtrack_failures", r.backtrack_failures},
          {"restarts", r.restarts},
          {"converged", r.converged}};
}

}  // namespace

void cmd_simulate(const Config& cfg) {
  cfg.only({"preset", "output", "grid", "protocol", "phantom", "coils", "mask", "snr_db", "noise_seed"});
  const ExperimentPreset p = parse_experiment(cfg);
  const fs::path out = output_dir(cfg);
  const SimulatedExperiment e = simulate_experiment(p);

  const json files = {{"truth", "truth.qmrt"}, {"tissue", "tissue.qmrt"},           {"coils", "coils.qmrt"},
                      {"mask", "mask.qmrt"},   {"kspace_full", "kspace_full.qmrt"}, {"kspace", "kspace.qmrt"}};
  write_tensor(e.phantom.truth.to_array(), out / "truth.qmrt");
  write_tensor(e.phantom.tissue, out / "tissue.qmrt");
  write_tensor(e.coils.maps, out / "coils.qmrt");
  write_tensor(e.mask.pattern, out / "mask.qmrt");
  write_tensor(e.kspace_full.samples, out / "kspace_full.qmrt");
  write_tensor(e.kspace.samples, out / "kspace.qmrt");

  json manifest = {{"preset", cfg.get<std::string>("preset", "t2_desk")},
                   {"files", files},
                   {"grid", {p.phantom.grid.ny, p.phantom.grid.nx}},
                   {"protocol", protocol_json(p.protocol)},
                   {"phantom", phantom_json(p.phantom)},
                   {"coils", p.coils},
                   {"mask", mask_json(p.mask, e.mask)},
                   {"snr_db", std::isfinite(p.snr_db) ? json(p.snr_db) : json("inf")},
                   {"noise_seed", p.noise_seed},
                   {"noise_sigma", e.noise_sigma}};
  write_json(manifest, out / "manifest.json");
}

void cmd_mask(const Config& cfg) {
  cfg.only({"grid", "contrasts", "mask", "output"});
  const Grid grid = parse_grid(cfg, "grid", {208, 256});
  const std::size_t contrasts = cfg.count("contrasts", 1);
  if (contrasts == 0) throw ConfigError("contrasts: must be >= 1");
  const MaskSpec spec = parse_mask(cfg.section("mask"), MaskSpec{});
  const SamplingMask p = make_mask(spec, grid, contrasts);
  const fs::path out = output_dir(cfg);
  write_tensor(p.pattern, out / "mask.qmrt");
  json j = mask_json(spec, p);
  j["grid"] = {grid.ny, grid.nx};
  write_json(j, out / "mask.json");
  std::cout << "sampled lines " << sampled_lines(p, 0) << " of " << grid.ny << ", net acceleration "
            << net_acceleration(p) << '\n';
}

void cmd_recon(const Config& cfg) {
  cfg.only({"input", "output", "method", "kspace", "mask", "protocol", "lambda", "n_blocks", "dc_iters",
            "init_iters", "r_max", "scaling", "scaled_solver", "regularizer", "nlcg", "cg_iters", "cg_tol"});
  const std::string method = cfg.get<std::string>("method", "nlcg_net");
  if (method != "nlcg" && method != "nlcg_net" && method != "zero_filled_fit" && method != "cg_sense_fit")
    throw ConfigError("method: unknown '" + method + "' (nlcg | nlcg_net | zero_filled_fit | cg_sense_fit)");

  UnrollConfig u;
  u.n_blocks = cfg.get<int>("n_blocks", u.n_blocks);
  u.dc_iters = cfg.get<int>("dc_iters", u.dc_iters);
  u.init_iters = cfg.get<int>("init_iters", u.init_iters);
  u.lambda = cfg.get<double>("lambda", u.lambda);
  u.r_max = cfg.positive("r_max", u.r_max);
  u.scaled_solver = cfg.get<bool>("scaled_solver", u.scaled_solver);
  u.nlcg = parse_nlcg(cfg.section("nlcg"));
  if (cfg.has("scaling")) {
    const auto& s = cfg.raw("scaling");
    if (!(s.is_string() && s.get<std::string>() == "auto")) {
      const auto w = cfg.require<std::vector<double>>("scaling");
      if (w.size() != kChannels) throw ConfigError("scaling: expected \"auto\" or [w_mx, w_my, w_r]");
      ChannelScaling cs;
      std::copy(w.begin(), w.end(), cs.w.begin());
      try {
        cs.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("scaling: ") + e.what());
      }
      u.scaling = cs;
    }
  }
  u.validate();
  const RegularizerSpec rspec = parse_regularizer(cfg.section("regularizer"));
  const int cg_iters = cfg.get<int>("cg_iters", 50);
  const double cg_tol = cfg.get<double>("cg_tol", 1e-10);

  const LoadedInput in = load_input(cfg);
  const fs::path out = output_dir(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  json report = {{"method", method}, {"input", cfg.require<std::string>("input")}};
  ParameterState x;
  if (method == "zero_filled_fit") {
    x = seed_from_zero_filled(in.m, u.r_max);
  } else if (method == "cg_sense_fit") {
    const auto cg = cg_sense_recon(in.m.y, in.m.coils, in.m.mask, cg_iters, cg_tol);
    x = pixelwise_fit(cg.images, in.m.protocol, u.r_max);
    project_rate(x, u.r_max);
    report["cg_residual_norms"] = cg.residual_norms;
  } else if (method == "nlcg") {
    auto init = initialize(in.m, u, u.scaling);
    x = std::move(init.x);
    report["nlcg"] = report_json(init.report);
  } else {
    auto reg = make_regularizer(rspec);
    auto res = run_unrolled(in.m, u, *reg);
    x = std::move(res.x);
    report["init"] = report_json(res.init_report);
    json blocks = json::array();
    for (const auto& b : res.block_reports) blocks.push_back(report_json(b));
    report["blocks"] = blocks;
    report["scaling"] = res.scaling.w;
    report["lambda"] = u.lambda;
    report["regularizer"] = rspec.name;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report["seconds"] = seconds;
  report["final_objective"] = objective(x, in.m, {});
  if (in.manifest.contains("mask")) report["accel"] = in.manifest.at("mask").at("net_acceleration");

  write_tensor(x.to_array(), out / "params.qmrt");
  write_json(report, out / "report.json");
}

void cmd_fit(const Config& cfg) {
  cfg.only({"images", "protocol", "r_max", "output"});
  const SignalImages s(read_complex(cfg.require<std::string>("images")));
  const AcquisitionProtocol prot = parse_protocol(cfg.section("protocol"));
  const double r_max = cfg.positive("r_max", 1.0);
  ParameterState x = pixelwise_fit(s, prot, r_max);
  project_rate(x, r_max);
  write_tensor(x.to_array(), output_dir(cfg) / "params.qmrt");
}

void cmd_split(const Config& cfg) {
  cfg.only({"mask", "acs_width", "rho", "seed", "output"});
  const SamplingMask p(read_bool(cfg.require<std::string>("mask")));
  validate_mask(p);
  const std::size_t acs = cfg.count("acs_width", 0);
  const double rho = cfg.get<double>("rho", 0.4);
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho: must be in (0, 1)");
  const auto seed = cfg.get<std::uint64_t>("seed", 0);
  const MaskSplit s = split_mask(p, acs, rho, seed);
  const fs::path out = output_dir(cfg);
  write_tensor(s.train.pattern, out / "train_mask.qmrt");
  write_tensor(s.loss.pattern, out / "loss_mask.qmrt");
  json counts = json::array();
  for (std::size_t k = 0; k < p.contrasts(); ++k)
    counts.push_back({{"train", s.train.count(k)}, {"loss", s.loss.count(k)}});
  write_json({{"acs_width", acs}, {"rho", rho}, {"seed", seed}, {"counts", counts},
              {"files", {{"train", "train_mask.qmrt"}, {"loss", "loss_mask.qmrt"}}}},
             out / "split.json");
}

void cmd_metrics(const MetricsArgs& a) {
  const ParameterState est = ParameterState::from_array(read_real(a.est_dir / "params.qmrt"));
  const ParameterState truth = ParameterState::from_array(read_real(a.truth_dir / "truth.qmrt"));
  if (est.grid() != truth.grid()) throw ShapeError("estimate and truth grids differ");

  std::string method = "unknown";
  double seconds = 0.0, accel = 1.0;
  if (fs::exists(a.est_dir / "report.json")) {
    const json r = read_json(a.est_dir / "report.json");
    method = r.value("method", method);
    seconds = r.value("seconds", seconds);
    accel = r.value("accel", accel);
  }

  std::optional<std::vector<std::uint8_t>> roi;
  if (a.roi == "tissue") {
    const BoolArray tissue = read_bool(a.truth_dir / "tissue.qmrt");
    if (tissue.rank() != 3 || tissue.extent(1) != truth.grid().ny || tissue.extent(2) != truth.grid().nx)
      throw ShapeError("tissue masks do not match the truth grid");
    roi.emplace(truth.voxels(), 0);
    for (std::size_t i = 0; i < tissue.extent(0); ++i) {
      auto t = tissue.slab(i);
      for (std::size_t v = 0; v < truth.voxels(); ++v) (*roi)[v] |= t[v];
    }
  } else if (a.roi == "all") {
    roi.emplace(truth.voxels(), 1);
  } else if (a.roi != "nonzero") {
    throw ConfigError("roi: expected nonzero | tissue | all");
  }
  auto roi_span = roi ? std::optional<std::span<const std::uint8_t>>(*roi) : std::nullopt;

  const auto me = est.magnitude(), mt = truth.magnitude();
  const std::string experiment = a.experiment.empty() ? a.truth_dir.filename().string() : a.experiment;
  std::vector<MetricRow> rows{
      {experiment, method, accel, "R", nrmse(est.r(), truth.r(), roi_span), seconds},
      {experiment, method, accel, "magnitude",
       nrmse(std::span<const double>(me), std::span<const double>(mt), roi_span), seconds}};
  if (a.output) {
    std::ofstream os(*a.output);
    if (!os) throw IoError("cannot write " + a.output->string());
    write_metrics_csv(os, rows);
  } else {
    write_metrics_csv(std::cout, rows);
  }
}

}  // namespace qmri::cli
