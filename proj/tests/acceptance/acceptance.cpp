// Acceptance suite: one PASS/FAIL line per criterion, exit status = failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "../unit/c_pad.hpp"
#include "../unit/fixtures.hpp"
#include "fatpad/attenuation.hpp"
#include "fatpad/bundle.hpp"
#include "fatpad/demo_head.hpp"
#include "fatpad/error.hpp"
#include "fatpad/green_coords.hpp"
#include "fatpad/hausdorff.hpp"
#include "fatpad/obj_io.hpp"
#include "fatpad/posing.hpp"
#include "fatpad/topology.hpp"

using namespace fatpad;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct DemoRig {
  std::string map_json;
  std::shared_ptr<const Rig> rig;
  double build_seconds = 0.0;
};

const DemoRig& demo() {
  static const DemoRig d = [] {
    DemoRig out;
    const TriMesh head = make_demo_head();
    out.map_json = make_demo_map(head);
    const auto t0 = Clock::now();
    out.rig = std::make_shared<const Rig>(build_rig(head, out.map_json));
    out.build_seconds = seconds_since(t0);
    return out;
  }();
  return d;
}

// 10242-vertex sphere with 30 small upper pads, giving a 60-vertex upper cage.
struct DenseRig {
  std::shared_ptr<const Rig> rig;
  double build_seconds = 0.0;
};

const DenseRig& dense() {
  static const DenseRig d = [] {
    const TriMesh mesh = make_icosphere(5);
    std::vector<fixtures::PadSpec> specs;
    auto add = [&](Vec3 dir, const char* region, double radius) {
      dir.normalize();
      std::vector<VertexId> vs;
      VertexId best = 0;
      for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
        const Vec3 p = mesh.position(v).normalized();
        if (std::acos(std::clamp(p.dot(dir), -1.0, 1.0)) < radius) vs.push_back(v);
        if (p.dot(dir) > mesh.position(best).normalized().dot(dir)) best = v;
      }
      const std::string id = "p" + std::to_string(specs.size());
      specs.push_back({id, region, regularize_pad(mesh, vs), {}, {{"h_" + id, best}}});
    };
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 5; ++j) add(Vec3(-0.9 + 0.36 * i, 0.02 + 0.18 * j, 1.0), "upper", 0.12);
    }
    for (const Vec3& dir : fixtures::SphereFace::lower_directions()) add(dir, "lower", 0.15);
    DenseRig out;
    const auto t0 = Clock::now();
    out.rig = std::make_shared<const Rig>(build_rig(mesh, fixtures::map_json(specs)));
    out.build_seconds = seconds_since(t0);
    return out;
  }();
  return d;
}

Vec3 random_step(std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return scale * Vec3(u(rng), u(rng), u(rng));
}

// ---------------------------------------------------------------------------

Verdict disc_weights() {
  const fixtures::DiscScene s;
  const auto rim = s.rim();
  const std::string rigid = fixtures::map_json({{"disc", "upper", s.pad_vertices(), {}, {{"h", 0}}}});
  const std::string movable = fixtures::map_json({{"disc", "upper", s.pad_vertices(), rim, {{"h", 0}}}});
  const FatPadMap map = load_map(rigid, s.mesh);
  const FatPadMap map_m = load_map(movable, s.mesh);
  const AttenuationEngine engine(s.mesh, map), engine_m(s.mesh, map_m);
  const Handle& h = map.handle("h");

  double worst = 0.0;
  int samples = 0;
  for (int k = 0; k < 100; ++k) {
    const double r = k / 100.0;
    const double expect = (1.0 - r) * (1.0 - r);
    for (int seg = 0; seg < fixtures::DiscScene::kSegments; ++seg) {
      worst = std::max(worst, std::abs(engine.compute_weight(h, fixtures::DiscScene::ring_vertex(k, seg)) - expect));
    }
    ++samples;
  }
  bool exact = engine.compute_weight(h, 0) == 1.0 && engine_m.compute_weight(map_m.handle("h"), 0) == 1.0;
  for (VertexId v : rim) {
    exact &= engine.compute_weight(h, v) == 0.0;
    exact &= engine_m.compute_weight(map_m.handle("h"), v) == 1.0;
  }
  return {worst < 1e-3 && exact,
          format("%d radii x %d rays, max |w - (1-r/R)^2| = %.2e, anchor/rigid/movable exact: %s", samples,
                 fixtures::DiscScene::kSegments, worst, exact ? "yes" : "no")};
}

Verdict locality() {
  const auto rig = demo().rig;
  std::mt19937 rng(1);
  const double scale = 0.02 * rig->mesh.bbox_diagonal();
  std::size_t moved_outside = 0, checked = 0;
  for (const Handle& h : rig->map.handles()) {
    PoseState s(rig);
    s.move_handle(h.id, s.handle_position(h.id) + random_step(rng, scale));
    const FatPad& pad = rig->map.pad(h.pad);
    for (VertexId v = 0; v < rig->mesh.vertex_count(); ++v) {
      if (pad.contains(v)) continue;
      ++checked;
      moved_outside += s.current_positions()[v] != rig->mesh.position(v);
    }
  }
  return {moved_outside == 0, format("%zu handles, %zu outside-pad vertex checks, %zu moved", rig->map.handles().size(),
                                     checked, moved_outside)};
}

Verdict smooth_borders() {
  const auto rig = demo().rig;
  const MeshTopology topo(rig->mesh);
  const AttenuationEngine engine(rig->mesh, rig->map);
  std::mt19937 rng(2);
  const double scale = 0.02 * rig->mesh.bbox_diagonal();
  std::size_t rays = 0, violations = 0;
  double worst = 0.0;
  for (const Handle& h : rig->map.handles()) {
    const FatPad& pad = rig->map.pad(h.pad);
    const GeodesicField hf = engine.handle_field(h);
    PoseState s(rig);
    s.move_handle(h.id, s.handle_position(h.id) + random_step(rng, scale));
    auto disp = [&](VertexId v) { return (s.current_positions()[v] - rig->mesh.position(v)).norm(); };
    for (VertexId b : pad.border) {
      if (pad.movable(b)) continue;
      // Walk down the handle's distance field to the anchor, then read the
      // path outward.
      std::vector<VertexId> path = {b};
      while (path.back() != h.anchor) {
        VertexId next = path.back();
        for (VertexId n : topo.neighbors(path.back())) {
          if (pad.contains(n) && hf[n] < hf[next]) next = n;
        }
        if (next == path.back()) break;
        path.push_back(next);
      }
      if (path.back() != h.anchor) continue;
      std::reverse(path.begin(), path.end());
      ++rays;
      for (std::size_t k = 1; k < path.size(); ++k) {
        if (pad.movable(path[k])) break;
        const double rise = disp(path[k]) - disp(path[k - 1]);
        worst = std::max(worst, rise);
        violations += rise > 1e-6;
      }
    }
  }
  return {violations == 0 && rays > 0,
          format("%zu rays, %zu steps rising by > 1e-6, largest rise %.2e", rays, violations, worst)};
}

struct GcErrors {
  double rest = 0.0, translation = 0.0, similarity = 0.0;
};

GcErrors gc_errors(const GCBinding& b, const TriMesh& mesh, const std::vector<Vec3>& cage) {
  auto max_error = [&](const std::vector<Vec3>& deformed, const Eigen::Matrix3d& A, const Vec3& t) {
    const PositionMatrix got = evaluate(b, deformed);
    double err = 0.0;
    for (std::size_t i = 0; i < b.vertices.size(); ++i) {
      const Vec3 want = A * mesh.position(b.vertices[i]) + t;
      err = std::max(err, (got.row(static_cast<Eigen::Index>(i)).transpose() - want).norm());
    }
    return err;
  };
  auto transformed = [&](const Eigen::Matrix3d& A, const Vec3& t) {
    std::vector<Vec3> out;
    for (const Vec3& p : cage) out.push_back(A * p + t);
    return out;
  };
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const Vec3 t(0.3, -1.2, 2.5);
  return {max_error(cage, I, Vec3::Zero()), max_error(transformed(I, t), I, t),
          std::max(max_error(transformed(1.5 * I, Vec3::Zero()), 1.5 * I, Vec3::Zero()),
                   max_error(transformed(0.8 * R, t), 0.8 * R, t))};
}

Verdict gc_correctness() {
  const TriMesh outer = make_box(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  Cage cube;
  cube.vertices = outer.positions();
  cube.triangles = outer.triangles();
  const TriMesh inner = make_tetrakis_box(Vec3(-0.5, -0.4, -0.6), Vec3(0.55, 0.5, 0.45));
  const GCBinding cb = bind(inner, cube);
  const GcErrors c = gc_errors(cb, inner, cube.vertices);

  const auto rig = demo().rig;
  GcErrors h;
  for (Region r : {Region::Upper, Region::Lower}) {
    const GcErrors e = gc_errors(rig->binding(r), rig->mesh, rig->cages[r].vertices);
    h = {std::max(h.rest, e.rest), std::max(h.translation, e.translation), std::max(h.similarity, e.similarity)};
  }
  const double cd = inner.bbox_diagonal(), hd = rig->mesh.bbox_diagonal();
  const bool ok = cb.exterior.empty() && c.rest < 1e-6 * cd && c.translation < 1e-6 && c.similarity / cd < 1e-4 &&
                  h.rest < 1e-6 * hd && h.translation < 1e-6 && h.similarity / hd < 1e-4;
  return {ok, format("cube-in-cube rest %.1e translation %.1e similarity %.1e rel; demo head rest %.1e translation "
                     "%.1e similarity %.1e rel",
                     c.rest / cd, c.translation, c.similarity / cd, h.rest / hd, h.translation, h.similarity / hd)};
}

Verdict geodesic_accuracy() {
  const TriMesh sphere = make_uv_sphere(21, 25, 1.0);
  const GeodesicSolver solver(sphere);
  double worst = 0.0;
  for (VertexId src : {VertexId(0), VertexId(37), VertexId(250), VertexId(401)}) {
    const GeodesicField f = solver.solve_from(src);
    const GeodesicField g = solver.oracle_refined_dijkstra(src, 8);
    for (VertexId v = 0; v < sphere.vertex_count(); ++v) {
      if (v != src) worst = std::max(worst, std::abs(g[v] - f[v]) / f[v]);
    }
  }

  const TriMesh grid = make_grid(20, 20, 2.0, 2.0);
  const GeodesicSolver gs(grid);
  double flat = 0.0;
  for (VertexId src : {VertexId(0), VertexId(220), VertexId(440)}) {
    const GeodesicField f = gs.solve_from(src);
    for (VertexId v = 0; v < grid.vertex_count(); ++v) {
      flat = std::max(flat, std::abs(f[v] - (grid.position(v) - grid.position(src)).norm()));
    }
  }

  const TriMesh ico = make_icosphere(3);
  VertexId a = 0, b = 0;
  for (VertexId v = 0; v < ico.vertex_count(); ++v) {
    if (ico.position(v).z() > ico.position(a).z()) a = v;
  }
  for (VertexId v = 0; v < ico.vertex_count(); ++v) {
    if ((ico.position(v) + ico.position(a)).norm() < (ico.position(b) + ico.position(a)).norm()) b = v;
  }
  const double antipodal = std::abs(solve_from(ico, a)[b] - kPi) / kPi;

  return {worst < 0.02 && flat < 1e-6 && antipodal < 0.01,
          format("%zu-vertex sphere max rel %.2f%%, flat grid %.1e, antipodal %.3f%%", sphere.vertex_count(),
                 100 * worst, flat, 100 * antipodal)};
}

Verdict c_pad_filter() {
  const fixtures::CScene c;
  const FatPadMap map = load_map(fixtures::map_json({{"c", "upper", c.pad, {}, {{"h", c.anchor}}}}), c.mesh);
  const AttenuationEngine engine(c.mesh, map);
  const Handle& h = map.handle("h");
  const GeodesicField hf = engine.handle_field(h);
  const FatPad& pad = map.pad("c");
  std::size_t compared = 0, mismatched = 0, multi = 0;
  for (VertexId v : pad.vertices) {
    if (v == h.anchor || pad.on_border(v)) continue;
    const auto expect = fixtures::brute_force_intersection(c.mesh, pad.vertices, h.anchor, v, engine.solver(), hf);
    ++compared;
    try {
      const IntersectionResult r = engine.border_intersection(h, v);
      multi += r.candidates_considered > 1;
      mismatched += !expect || (r.position - *expect).norm() >= 1e-9;
    } catch (const Error&) {
      mismatched += expect.has_value();
    }
  }
  return {mismatched == 0 && compared > 0,
          format("%zu pad vertices compared, %zu with competing candidates, %zu mismatches", compared, multi,
                 mismatched)};
}

Verdict cage_validity() {
  std::string detail;
  bool ok = true;
  for (const auto& [name, rig] : {std::pair{"demo head", demo().rig}, std::pair{"dense sphere", dense().rig}}) {
    for (Region r : {Region::Upper, Region::Lower}) {
      const Cage& cage = rig->cages[r];
      const bool manifold = is_closed_manifold(cage);
      const std::size_t hits = count_intersections(cage, rig->mesh, region_triangles(rig->mesh, rig->map, r));
      ok &= manifold && hits == 0;
      detail += format("%s %s: %zu verts %s %zu hits; ", name, to_string(r).c_str(), cage.vertices.size(),
                       manifold ? "closed" : "OPEN", hits);
    }
  }

  const auto rig = demo().rig;
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> action(0, 9);
  std::uniform_int_distribution<std::size_t> pick(0, rig->map.handles().size() - 1);
  const double scale = 0.02 * rig->mesh.bbox_diagonal();
  PoseState s(rig, 16);
  std::size_t moved_fixed = 0, rejected = 0;
  for (int i = 0; i < 100; ++i) {
    const int a = action(rng);
    if (a < 6) {
      const HandleId& h = rig->map.handles()[pick(rng)].id;
      s.move_handle(h, s.handle_position(h) + random_step(rng, scale));
    } else if (a < 7) {
      const Region r = i % 2 ? Region::Upper : Region::Lower;
      const auto& fixed = rig->cages[r].fixed;
      try {
        s.move_cage_vertex(r, fixed[i % fixed.size()], Vec3(1, 2, 3));
      } catch (const Error& e) {
        rejected += e.code() == ErrorCode::FixedVertex;
      }
    } else if (a < 9) {
      s.commit();
    } else {
      s.undo();
    }
    for (Region r : {Region::Upper, Region::Lower}) {
      for (VertexId v : rig->cages[r].fixed) moved_fixed += s.cage_positions(r)[v] != rig->cages[r].vertices[v];
    }
  }
  ok &= moved_fixed == 0;
  detail += format("100-edit fuzz: %zu fixed-vertex moves, %zu direct attempts rejected", moved_fixed, rejected);
  return {ok, detail};
}

Verdict cage_independence() {
  const auto rig = demo().rig;
  std::size_t checked = 0, moved = 0;
  for (Region r : {Region::Upper, Region::Lower}) {
    const Region other = r == Region::Upper ? Region::Lower : Region::Upper;
    PoseState s(rig);
    std::mt19937 rng(r == Region::Upper ? 3 : 4);
    for (const auto& [id, cv] : rig->cages[r].handle_binding) {
      s.move_handle(id, s.handle_position(id) + random_step(rng, 0.02 * rig->mesh.bbox_diagonal()));
    }
    for (VertexId v = 0; v < rig->mesh.vertex_count(); ++v) {
      bool by_r = false, by_other = false;
      for (const Handle& h : rig->map.handles()) {
        const bool w = rig->weights_of(h.id).weight(v) > 0.0;
        (rig->region_of(h.id) == r ? by_r : by_other) |= w;
      }
      if (by_r || !by_other) continue;
      ++checked;
      moved += s.current_positions()[v] != rig->mesh.position(v);
    }
    moved += s.cage_positions(other) != rig->cages[other].vertices;
  }
  return {moved == 0 && checked > 0,
          format("%zu vertices weighted only by the other cage, %zu displaced", checked, moved)};
}

struct Latency {
  double median = 0.0, p99 = 0.0;
};

Latency time_moves(const std::shared_ptr<const Rig>& rig, int count) {
  PoseState s(rig);
  std::mt19937 rng(5);
  const double scale = 0.005 * rig->mesh.bbox_diagonal();
  std::vector<double> ms;
  for (int i = 0; i < count; ++i) {
    const HandleId& h = rig->map.handles()[static_cast<std::size_t>(i) % rig->map.handles().size()].id;
    const Vec3 target = s.handle_position(h) + random_step(rng, scale);
    const auto t0 = Clock::now();
    s.move_handle(h, target);
    ms.push_back(1e3 * seconds_since(t0));
    if (i % 10 == 9) s.commit();
  }
  std::sort(ms.begin(), ms.end());
  return {ms[ms.size() / 2], ms[std::min(ms.size() - 1, ms.size() * 99 / 100)]};
}

// Every vertex of a 10242-vertex sphere bound to a closed 62-vertex cage, then
// evaluated and blended with full weight.
Latency time_full_kernel(int count) {
  const TriMesh inner = make_icosphere(5, 0.8);
  const TriMesh cage_mesh = make_uv_sphere(7, 10, 1.0);
  Cage cage;
  cage.vertices = cage_mesh.positions();
  cage.triangles = cage_mesh.triangles();
  const GCBinding b = bind(inner, cage);
  std::vector<Vec3> out = inner.positions();
  const PositionMatrix g0 = evaluate(b, cage.vertices);
  std::mt19937 rng(6);
  std::vector<double> ms;
  std::vector<Vec3> deformed = cage.vertices;
  for (int i = 0; i < count; ++i) {
    deformed[static_cast<std::size_t>(i) % deformed.size()] += random_step(rng, 0.01);
    const auto t0 = Clock::now();
    const PositionMatrix g1 = evaluate(b, deformed);
    for (std::size_t row = 0; row < b.vertices.size(); ++row) {
      const auto r = static_cast<Eigen::Index>(row);
      out[b.vertices[row]] = inner.position(b.vertices[row]) + (g1.row(r) - g0.row(r)).transpose();
    }
    ms.push_back(1e3 * seconds_since(t0));
  }
  std::sort(ms.begin(), ms.end());
  return {ms[ms.size() / 2], ms[std::min(ms.size() - 1, ms.size() * 99 / 100)]};
}

Verdict interactivity() {
  const Latency head = time_moves(demo().rig, 500);
  const Latency dense_moves = time_moves(dense().rig, 500);
  const Latency kernel = time_full_kernel(100);
  const double build = std::max(demo().build_seconds, dense().build_seconds);
  bool ok = build < 600.0;
  for (const Latency& l : {head, dense_moves, kernel}) ok &= l.median < 16.0 && l.p99 < 33.0;
  return {ok, format("move_handle median/p99 ms: demo head %.3f/%.3f, 60-vertex cage %.3f/%.3f, all 10242 vertices "
                     "bound %.2f/%.2f; build %.1f s",
                     head.median, head.p99, dense_moves.median, dense_moves.p99, kernel.median, kernel.p99, build)};
}

Verdict hausdorff() {
  const TriMesh a = make_icosphere(4, 1.0);
  const TriMesh b = make_icosphere(4, 1.1);
  const double same = hausdorff_rms(a, a).symmetric;
  const double apart = hausdorff_rms(a, b).symmetric;
  return {same == 0.0 && std::abs(apart - 0.1) <= 0.005,
          format("identical %.3g, r=1 vs r=1.1 %.5f", same, apart)};
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
  std::size_t count_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
  if (names.size() != count_b) return false;
  for (const fs::path& n : names) {
    if (!fs::exists(b / n) || read_text_file(a / n) != read_text_file(b / n)) return false;
  }
  files = names.size();
  return true;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / format("fatpad_acceptance_%d", static_cast<int>(::getpid()));
  fs::remove_all(root);
  const Rig second = build_rig(make_demo_head(), demo().map_json);
  write_bundle(*demo().rig, root / "a");
  write_bundle(second, root / "b");
  std::size_t files = 0;
  const bool bundles = same_tree(root / "a", root / "b", files);

  const auto rig = demo().rig;
  std::vector<PoseEdit> edits;
  std::mt19937 rng(8);
  for (int i = 0; i < 12; ++i) {
    edits.push_back({rig->map.handles()[static_cast<std::size_t>(i) % rig->map.handles().size()].id,
                     random_step(rng, 0.02 * rig->mesh.bbox_diagonal())});
  }
  const std::string script = save_pose(make_pose_file(*rig, edits));
  auto posed = [&] {
    const PoseState s = apply_pose_script(load_bundle(root / "b"), load_pose(script));
    return save_obj(s.rig().mesh.with_positions(s.current_positions()));
  };
  const std::string first = posed(), again = posed();
  fs::remove_all(root);
  return {bundles && first == again,
          format("bundle files identical: %s (%zu files); pose script OBJ identical: %s (%zu bytes)",
                 bundles ? "yes" : "no", files, first == again ? "yes" : "no", first.size())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"attenuation-disc", disc_weights},
      {"locality", locality},
      {"smooth-borders", smooth_borders},
      {"gc-correctness", gc_correctness},
      {"geodesic-accuracy", geodesic_accuracy},
      {"c-pad-filter", c_pad_filter},
      {"cage-validity", cage_validity},
      {"cage-independence", cage_independence},
      {"interactivity", interactivity},
      {"hausdorff-rms", hausdorff},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %-18s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
