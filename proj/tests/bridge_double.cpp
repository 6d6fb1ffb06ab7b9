// Stand-in for an external regularizer process, driven by its first argument:
//   echo         copy x_in.qmrt to z_out.qmrt
//   check_meta   echo, after checking meta.json against x_in.qmrt
//   wrong_shape  write a tensor with one extra row
//   nan          echo with one value replaced by NaN
//   fail         exit 1 without output
//   sleep        sleep for a minute
// The workdir is the last argument.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>

#include <json.hpp>

#include "qmri/tensor_io.hpp"

using namespace qmri;

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: bridge_double MODE WORKDIR\n";
    return 2;
  }
  const std::string mode = argv[1];
  const std::filesystem::path dir = argv[2];
  if (mode == "fail") return 1;
  if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::minutes(1));
    return 0;
  }
  try {
    RealArray x = read_real(dir / "x_in.qmrt");
    if (mode == "check_meta") {
      const auto meta = nlohmann::json::parse(std::ifstream(dir / "meta.json"));
      if (meta.at("ny").get<std::size_t>() != x.extent(1) || meta.at("nx").get<std::size_t>() != x.extent(2) ||
          meta.at("scaling").size() != 3) {
        std::cerr << "meta.json does not describe x_in.qmrt\n";
        return 1;
      }
      const auto kind = meta.at("mapping_kind").get<std::string>();
      if (kind != "T1" && kind != "T2") return 1;
    } else if (mode == "wrong_shape") {
      x = RealArray({x.extent(0), x.extent(1) + 1, x.extent(2)});
    } else if (mode == "nan") {
      x[0] = std::numeric_limits<double>::quiet_NaN();
    } else if (mode != "echo") {
      std::cerr << "unknown mode " << mode << '\n';
      return 2;
    }
    write_tensor(x, dir / "z_out.qmrt");
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
