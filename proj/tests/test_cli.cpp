#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qmri/metrics.hpp"
#include "qmri/tensor_io.hpp"
#include "qmri/types.hpp"

using namespace qmri;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qmri_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) {
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(QMRI_CLI) + " --threads 1 " + args + " > /dev/null 2> " + err.string();
    const int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
  }

  fs::path write_config(const std::string& name, const json& j) {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p;
  }

  // Small noiseless-ish acquisition shared by the recon tests.
  fs::path simulate_small() {
    const auto out = dir_ / "sim";
    const auto cfg = write_config("sim.json", {{"preset", "t2_desk"},
                                               {"grid", {20, 16}},
                                               {"coils", 4},
                                               {"mask", {{"accel", 2}, {"acs_width", 4}}},
                                               {"output", out.string()}});
    EXPECT_EQ(run("simulate " + cfg.string()).code, 0);
    return out;
  }

  fs::path dir_;
};

json read_json(const fs::path& p) { return json::parse(std::ifstream(p)); }

}  // namespace

TEST_F(CliTest, SimulatePresetWritesManifest) {
  const auto out = dir_ / "nested" / "run";
  const auto cfg = write_config("c.json", {{"preset", "t2_desk"}, {"output", out.string()}});
  ASSERT_EQ(run("simulate " + cfg.string()).code, 0);
  const auto m = read_json(out / "manifest.json");
  EXPECT_EQ(m["files"].size(), 6u);
  for (const auto& [k, f] : m["files"].items()) EXPECT_TRUE(fs::exists(out / f.get<std::string>())) << k;
  EXPECT_EQ(m["grid"], json({52, 64}));
  EXPECT_EQ(m["protocol"]["times_ms"].size(), 8u);
  EXPECT_EQ(m["coils"], 8);
  EXPECT_GT(m["noise_sigma"].get<double>(), 0.0);
  const auto k = read_complex(out / "kspace.qmrt");
  EXPECT_EQ(k.shape(), (Shape{8, 8, 52, 64}));
}

TEST_F(CliTest, SetOverridesAndKeyErrors) {
  const auto out = dir_ / "o";
  auto r = run("simulate --set output=" + out.string() + " --set mask.accel=0");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mask.accel"), std::string::npos) << r.err;

  r = run("simulate --set output=" + out.string() + " --set mask.acel=3");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("mask.acel"), std::string::npos) << r.err;

  r = run("simulate --set output=" + out.string() + " --set coils=\"\\\"eight\\\"\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("coils"), std::string::npos) << r.err;

  r = run("simulate --set output=" + out.string() + " --set preset=t9");
  EXPECT_EQ(r.code, 2);

  EXPECT_EQ(run("simulate " + (dir_ / "missing.json").string()).code, 2);
  EXPECT_EQ(run("bogus").code, 2);
}

TEST_F(CliTest, MaskCommandCountsLines) {
  const auto out = dir_ / "m";
  ASSERT_EQ(run("mask --set grid=[208,32] --set mask.accel=4 --set mask.acs_width=24 --set output=" + out.string()).code,
            0);
  const auto j = read_json(out / "mask.json");
  EXPECT_EQ(j["sampled_lines"][0], 70);
  EXPECT_EQ(read_bool(out / "mask.qmrt").shape(), (Shape{1, 208, 32}));
}

TEST_F(CliTest, SplitCommand) {
  const auto sim = simulate_small();
  const auto out = dir_ / "split";
  ASSERT_EQ(run("split --set mask=" + (sim / "mask.qmrt").string() + " --set acs_width=4 --set rho=0.4 --set seed=3" +
                " --set output=" + out.string())
                .code,
            0);
  const auto train = read_bool(out / "train_mask.qmrt"), loss = read_bool(out / "loss_mask.qmrt"),
             p = read_bool(sim / "mask.qmrt");
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(train[i] | loss[i], p[i]);
    EXPECT_FALSE(train[i] && loss[i]);
  }
}

TEST_F(CliTest, ZeroFilledFitAndMetrics) {
  const auto sim = simulate_small();
  const auto est = dir_ / "zf";
  ASSERT_EQ(run("recon --set method=zero_filled_fit --set input=" + sim.string() + " --set output=" + est.string()).code,
            0);
  const auto report = read_json(est / "report.json");
  EXPECT_FALSE(report.contains("nlcg"));
  EXPECT_FALSE(report.contains("blocks"));

  const auto csv = dir_ / "m.csv";
  ASSERT_EQ(run("metrics --est " + est.string() + " --truth " + sim.string() + " -o " + csv.string()).code, 0);
  std::ifstream in(csv);
  std::string header, row_r, row_m;
  std::getline(in, header);
  std::getline(in, row_r);
  std::getline(in, row_m);
  EXPECT_EQ(header, "experiment,method,accel,map,nrmse,seconds");
  EXPECT_NE(row_r.find(",zero_filled_fit,"), std::string::npos);
  EXPECT_NE(row_r.find(",R,"), std::string::npos);
  EXPECT_NE(row_m.find(",magnitude,"), std::string::npos);
}

TEST_F(CliTest, MetricsAgainstItselfAndPerturbation) {
  const auto sim = simulate_small();
  const auto est = dir_ / "est";
  fs::create_directories(est);
  auto truth = read_real(sim / "truth.qmrt");
  write_tensor(truth, est / "params.qmrt");
  const auto csv = dir_ / "self.csv";
  ASSERT_EQ(run("metrics --est " + est.string() + " --truth " + sim.string() + " -o " + csv.string()).code, 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) EXPECT_NE(line.find(",0,"), std::string::npos) << line;

  // R += 0.001 on every tissue voxel
  const std::size_t n = truth.extent(1) * truth.extent(2);
  auto pert = truth;
  double ref2 = 0.0;
  std::size_t count = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (truth[2 * n + v] == 0.0) continue;
    pert[2 * n + v] += 0.001;
    ref2 += truth[2 * n + v] * truth[2 * n + v];
    ++count;
  }
  write_tensor(pert, est / "params.qmrt");
  ASSERT_EQ(run("metrics --est " + est.string() + " --truth " + sim.string() + " -o " + csv.string()).code, 0);
  std::ifstream in2(csv);
  std::getline(in2, line);
  std::getline(in2, line);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  ASSERT_EQ(cols.size(), 6u);
  EXPECT_NEAR(std::stod(cols[4]), 0.001 * std::sqrt(static_cast<double>(count)) / std::sqrt(ref2), 1e-9);

  EXPECT_EQ(run("metrics --est " + (dir_ / "nothing").string() + " --truth " + sim.string()).code, 2);
  write_tensor(RealArray({3, 4, 4}), est / "params.qmrt");
  EXPECT_EQ(run("metrics --est " + est.string() + " --truth " + sim.string()).code, 2);
}

TEST_F(CliTest, EchoBridgeMatchesIdentity) {
  const auto sim = simulate_small();
  const std::string common = " --set input=" + sim.string() + " --set method=nlcg_net --set init_iters=20 --set dc_iters=3";
  ASSERT_EQ(run("recon" + common + " --set regularizer.name=identity --set output=" + (dir_ / "id").string()).code, 0);
  ASSERT_EQ(run("recon" + common + " --set regularizer.name=external --set regularizer.command='[\"" QMRI_BRIDGE_DOUBLE
                "\",\"echo\"]' --set regularizer.workdir=" +
                (dir_ / "bridge").string() + " --set output=" + (dir_ / "ext").string())
                .code,
            0);
  const auto a = read_real(dir_ / "id" / "params.qmrt"), b = read_real(dir_ / "ext" / "params.qmrt");
  ASSERT_EQ(a.shape(), b.shape());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10 * (1 + std::abs(a[i])));
  const auto report = read_json(dir_ / "ext" / "report.json");
  EXPECT_EQ(report["blocks"].size(), 3u);
}

TEST_F(CliTest, BridgeFailureExitsFour) {
  const auto sim = simulate_small();
  const auto r = run("recon --set input=" + sim.string() +
                     " --set method=nlcg_net --set init_iters=5 --set regularizer.name=external"
                     " --set regularizer.command='[\"" QMRI_BRIDGE_DOUBLE "\",\"fail\"]' --set regularizer.workdir=" +
                     (dir_ / "b").string() + " --set output=" + (dir_ / "o").string());
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("unroll block 0"), std::string::npos) << r.err;
}

TEST_F(CliTest, NonFiniteDataExitsThree) {
  const auto sim = simulate_small();
  auto k = read_complex(sim / "kspace.qmrt");
  for (auto& z : k.values()) z = {std::numeric_limits<double>::quiet_NaN(), 0.0};
  write_tensor(k, sim / "kspace_nan.qmrt");
  const auto r = run("recon --set input=" + sim.string() + " --set kspace=kspace_nan.qmrt --set method=nlcg" +
                     " --set init_iters=5 --set output=" + (dir_ / "o").string());
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(CliTest, FitCommand) {
  ComplexArray s({3, 2, 3});
  const double te[3] = {10, 20, 40};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t v = 0; v < 6; ++v) s[k * 6 + v] = std::exp(-te[k] / 80.0);
  write_tensor(s, dir_ / "img.qmrt");
  const auto cfg = write_config("fit.json", {{"images", (dir_ / "img.qmrt").string()},
                                             {"protocol", {{"kind", "T2"}, {"times_ms", {10, 20, 40}}}},
                                             {"output", (dir_ / "fit").string()}});
  ASSERT_EQ(run("fit " + cfg.string()).code, 0);
  const auto x = read_real(dir_ / "fit" / "params.qmrt");
  EXPECT_NEAR(x[2 * 6], 1.0 / 80.0, 1e-12);
}

TEST_F(CliTest, UnknownMethodIsConfigError) {
  const auto sim = simulate_small();
  const auto r = run("recon --set input=" + sim.string() + " --set method=subspace --set output=" + (dir_ / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("method"), std::string::npos);
}
