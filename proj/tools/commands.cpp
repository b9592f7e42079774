#include "commands.hpp"

#include <fstream>
#include <iostream>

#include <spdlog/fmt/fmt.h>

#include "fatpad/bundle.hpp"
#include "fatpad/demo_head.hpp"
#include "fatpad/error.hpp"
#include "fatpad/hausdorff.hpp"
#include "fatpad/obj_io.hpp"
#include "fatpad/session.hpp"

namespace fatpad::cli {

namespace fs = std::filesystem;

namespace {

TriMesh posed_mesh(const Rig& rig, const std::vector<Vec3>& positions) {
  return TriMesh(positions, rig.mesh.triangles());
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const StageError& e) {
    std::cerr << fmt::format("error [{}]: {}\n", to_string(e.code()), e.detail());
    return 2;
  } catch (const Error& e) {
    std::cerr << fmt::format("error [{}]: {}\n", to_string(e.code()), e.detail());
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int run_demo(const fs::path& out_dir) {
  return guarded([&] {
    fs::create_directories(out_dir);
    const TriMesh head = make_demo_head();
    save_obj_file(head, out_dir / "demo_head.obj");
    write_text_file(out_dir / "demo_map.json", make_demo_map(head));
    std::cout << fmt::format("wrote {} and {} ({} vertices)\n", (out_dir / "demo_head.obj").string(),
                             (out_dir / "demo_map.json").string(), head.vertex_count());
    return 0;
  });
}

int run_build(const BuildArgs& args) {
  return guarded([&] {
    BuildOptions opts;
    opts.cage.alpha_base = args.alpha_base;
    if (args.geodesic == "exact") {
      opts.attenuation.geodesic.method = GeodesicMethod::Exact;
    } else if (args.geodesic == "dijkstra") {
      opts.attenuation.geodesic.method = GeodesicMethod::RefinedDijkstra;
    } else {
      throw Error(ErrorCode::InvalidArgument, fmt::format("unknown geodesic method '{}'", args.geodesic));
    }
    TriMesh mesh = load_obj_file(args.mesh);
    const std::string map = read_text_file(args.map);
    double total = 0.0;
    const Rig rig = build_rig(std::move(mesh), map, opts, [&](const StageTiming& t) {
      total += t.seconds;
      std::cout << fmt::format("{:<14}{:>9.3f} s\n", t.stage, t.seconds) << std::flush;
    });
    write_bundle(rig, args.out_dir);
    std::cout << fmt::format("{:<14}{:>9.3f} s\nbundle written to {}\n", "total", total, args.out_dir.string());
    return 0;
  });
}

int run_pose(const fs::path& bundle, const fs::path& script, const fs::path& out) {
  return guarded([&] {
    const auto rig = load_bundle(bundle);
    const PoseState state = apply_pose_script(rig, load_pose(read_text_file(script)));
    save_obj_file(posed_mesh(*rig, state.current_positions()), out);
    std::cout << fmt::format("applied {} edits, wrote {}\n", state.undo_size(), out.string());
    return 0;
  });
}

int run_diff(const fs::path& a, const fs::path& b, const std::optional<fs::path>& heat) {
  return guarded([&] {
    const TriMesh ma = load_obj_file(a), mb = load_obj_file(b);
    const HausdorffRms h = hausdorff_rms(ma, mb);
    std::cout << fmt::format("hausdorff rms {:.9g} (a->b {:.9g}, b->a {:.9g})\n", h.symmetric, h.a_to_b, h.b_to_a);
    if (heat) {
      std::string text;
      for (double d : vertex_distances_to_surface(ma, mb)) text += fmt::format("{}\n", d);
      write_text_file(*heat, text);
    }
    return 0;
  });
}

int run_replay(const fs::path& bundle, const fs::path& log, const fs::path& out) {
  return guarded([&] {
    const auto rig = load_bundle(bundle);
    std::ifstream in(log);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", log.string()));
    std::vector<std::string> messages;
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) messages.push_back(line);
    }
    save_obj_file(posed_mesh(*rig, replay_messages(rig, messages)), out);
    std::cout << fmt::format("replayed {} messages, wrote {}\n", messages.size(), out.string());
    return 0;
  });
}

}  // namespace fatpad::cli
