#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "server.hpp"

int main(int argc, char** argv) {
  using namespace fatpad::cli;
  namespace fs = std::filesystem;

  CLI::App app{"fatpad: region-limited cage posing of face meshes"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  fs::path demo_out = "data";
  auto* demo = app.add_subcommand("demo", "write the synthetic demo head and its pad map");
  demo->add_option("--out-dir", demo_out, "output directory")->capture_default_str();

  BuildArgs build_args;
  auto* build = app.add_subcommand("build", "run the offline pipeline and write a bundle");
  build->add_option("--mesh", build_args.mesh, "input OBJ")->required()->check(CLI::ExistingFile);
  build->add_option("--map", build_args.map, "fat pad map JSON")->required()->check(CLI::ExistingFile);
  build->add_option("--out-dir", build_args.out_dir, "bundle directory")->required();
  build->add_option("--alpha-base", build_args.alpha_base, "cage offset as a fraction of the bbox diagonal")
      ->capture_default_str();
  build->add_option("--geodesic", build_args.geodesic, "geodesic solver")
      ->check(CLI::IsMember({"exact", "dijkstra"}))
      ->capture_default_str();

  fs::path bundle, script, out;
  auto* pose = app.add_subcommand("pose", "apply a pose script to a bundle and write the posed OBJ");
  pose->add_option("--bundle", bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
  pose->add_option("--script", script, "pose script JSON")->required()->check(CLI::ExistingFile);
  pose->add_option("--out", out, "output OBJ")->required();

  fs::path diff_a, diff_b;
  std::optional<fs::path> heat;
  auto* diff = app.add_subcommand("diff", "Hausdorff RMS between two meshes");
  diff->add_option("--a", diff_a, "first OBJ")->required()->check(CLI::ExistingFile);
  diff->add_option("--b", diff_b, "second OBJ")->required()->check(CLI::ExistingFile);
  diff->add_option("--heat", heat, "write per-vertex distances of a to the surface of b");

  fs::path log;
  auto* replay = app.add_subcommand("replay", "replay a recorded session message log");
  replay->add_option("--bundle", bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
  replay->add_option("--log", log, "JSON-lines client messages")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out, "output OBJ")->required();

  unsigned short port = 8765;
  std::string host = "127.0.0.1";
  std::optional<fs::path> www;
  auto* serve = app.add_subcommand("serve", "serve posing sessions over WebSocket");
  serve->add_option("--bundle", bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--www", www, "static files for plain HTTP requests")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("fatpad"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  if (*demo) return run_demo(demo_out);
  if (*build) return run_build(build_args);
  if (*pose) return run_pose(bundle, script, out);
  if (*diff) return run_diff(diff_a, diff_b, heat);
  if (*replay) return run_replay(bundle, log, out);
  if (*serve) return run_serve(bundle, host, port, www);
  return 1;
}
