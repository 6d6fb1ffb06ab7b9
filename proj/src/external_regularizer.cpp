#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "qmri/regularizer.hpp"
#include "qmri/tensor_io.hpp"

extern char** environ;

namespace qmri {

namespace {

// Runs argv to completion; returns the exit status or throws BridgeError.
int run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout) {
  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  if (const int rc = posix_spawnp(&pid, args[0], nullptr, nullptr, args.data(), environ); rc != 0) {
    throw BridgeError("cannot spawn '" + argv[0] + "': " + std::strerror(rc));
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    int status = 0;
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      if (WIFEXITED(status)) return WEXITSTATUS(status);
      throw BridgeError("bridge process terminated by signal " + std::to_string(WTERMSIG(status)));
    }
    if (done < 0 && errno != EINTR) throw BridgeError(std::string("waitpid failed: ") + std::strerror(errno));
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw BridgeError("bridge process timed out after " + std::to_string(timeout.count()) + " ms");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

class ExternalRegularizer final : public Regularizer {
 public:
  ExternalRegularizer(std::vector<std::string> command, std::filesystem::path workdir,
                      std::chrono::milliseconds timeout)
      : command_(std::move(command)), workdir_(std::move(workdir)), timeout_(timeout) {
    if (command_.empty()) throw ConfigError("external regularizer needs a command");
  }

  ParameterState apply(const ParameterState& x, const RegularizerContext& ctx) override {
    std::error_code ec;
    std::filesystem::create_directories(workdir_, ec);
    if (ec) throw BridgeError("cannot create bridge workdir " + workdir_.string() + ": " + ec.message());
    const auto x_in = workdir_ / "x_in.qmrt";
    const auto z_out = workdir_ / "z_out.qmrt";
    std::filesystem::remove(z_out, ec);

    try {
      write_tensor(x.to_array(), x_in);
      nlohmann::json meta = {{"ny", x.grid().ny},
                             {"nx", x.grid().nx},
                             {"mapping_kind", to_string(ctx.kind)},
                             {"scaling", ctx.scaling.w}};
      std::ofstream(workdir_ / "meta.json") << meta.dump(2) << '\n';
    } catch (const IoError& e) {
      throw BridgeError(std::string("cannot write bridge input: ") + e.what());
    }

    std::vector<std::string> argv = command_;
    argv.push_back(workdir_.string());
    if (const int rc = run_process(argv, timeout_); rc != 0) {
      throw BridgeError("bridge command exited with status " + std::to_string(rc));
    }

    RealArray z;
    try {
      z = read_real(z_out);
    } catch (const IoError& e) {
      throw BridgeError(std::string("bad bridge output: ") + e.what());
    }
    const Shape want{kChannels, x.grid().ny, x.grid().nx};
    if (z.shape() != want) {
      throw BridgeError("bridge output shape " + shape_string(z.shape()) + " does not match " + shape_string(want));
    }
    ParameterState out = ParameterState::from_array(z);
    if (!out.all_finite()) throw BridgeError("bridge output contains non-finite values");
    return out;
  }

  std::string name() const override { return "external"; }

 private:
  std::vector<std::string> command_;
  std::filesystem::path workdir_;
  std::chrono::milliseconds timeout_;
};

}  // namespace

std::unique_ptr<Regularizer> external_regularizer(std::vector<std::string> command, std::filesystem::path workdir,
                                                  std::chrono::milliseconds timeout) {
  return std::make_unique<ExternalRegularizer>(std::move(command), std::move(workdir), timeout);
}

}  // namespace qmri
