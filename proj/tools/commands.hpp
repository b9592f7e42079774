#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace fatpad::cli {

struct BuildArgs {
  std::filesystem::path mesh;
  std::filesystem::path map;
  std::filesystem::path out_dir;
  double alpha_base = 0.05;
  std::string geodesic = "exact";
};

// Each command prints to stdout/stderr and returns the process exit code.
int run_demo(const std::filesystem::path& out_dir);
int run_build(const BuildArgs& args);
int run_pose(const std::filesystem::path& bundle, const std::filesystem::path& script, const std::filesystem::path& out);
int run_diff(const std::filesystem::path& a, const std::filesystem::path& b,
             const std::optional<std::filesystem::path>& heat);
/// Replays a JSON-lines log of client messages and writes the final mesh.
int run_replay(const std::filesystem::path& bundle, const std::filesystem::path& log, const std::filesystem::path& out);

}  // namespace fatpad::cli
