#include <doctest.h>

#include <set>

#include "fatpad/cage.hpp"
#include "fatpad/error.hpp"
#include "fatpad/spatial.hpp"
#include "fixtures.hpp"

using namespace fatpad;
using fixtures::PadSpec;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

// One pad covering a closed polyhedron, one handle per vertex.
FatPadMap whole_mesh_map(const TriMesh& mesh) {
  PadSpec p{"all", "upper", {}, {}, {}};
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    p.vertices.push_back(v);
    p.handles.push_back({"h" + std::to_string(v), v});
  }
  return load_map(fixtures::map_json({p}), mesh);
}

std::size_t brute_force_intersections(const Cage& cage, const TriMesh& mesh,
                                      const std::vector<TriangleId>& subset) {
  std::size_t n = 0;
  for (const Triangle& c : cage.triangles) {
    for (TriangleId t : subset) {
      const Triangle& m = mesh.triangle(t);
      n += triangles_intersect({cage.vertices[c[0]], cage.vertices[c[1]], cage.vertices[c[2]]},
                               {mesh.position(m[0]), mesh.position(m[1]), mesh.position(m[2])});
    }
  }
  return n;
}

// Pyramid cap: apex above the center of a ring of `n` vertices.
Cage fan_cage(int n, double offset) {
  Cage c;
  c.vertices.push_back(Vec3(0, 0, 1));
  c.handle_binding["c"] = 0;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * kPi * i / n;
    c.vertices.push_back(Vec3(std::cos(a), std::sin(a), 0));
    c.handle_binding["r" + std::to_string(i)] = static_cast<VertexId>(i + 1);
  }
  for (int i = 0; i < n; ++i) {
    c.triangles.push_back({0, static_cast<VertexId>(i + 1), static_cast<VertexId>((i + 1) % n + 1)});
  }
  c.offset = offset;
  c.offset_directions.assign(c.vertices.size(), Vec3::UnitZ());
  return c;
}

}  // namespace

TEST_CASE("hull cage topology") {
  const TriMesh tet({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}});
  CHECK(hull_cage(tet, whole_mesh_map(tet), Region::Upper).triangles.size() == 4);

  const TriMesh oct({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}},
                    {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
  const Cage c = hull_cage(oct, whole_mesh_map(oct), Region::Upper);
  CHECK(c.triangles.size() == 8);
  CHECK(c.handle_binding.size() == 6);
  CHECK(is_closed_manifold(c));
  CHECK(signed_volume(c) > 0);

  CHECK(code_of([&] { hull_cage(oct, whole_mesh_map(oct), Region::Lower); }) == ErrorCode::DegenerateHull);
}

TEST_CASE("coplanar anchors are a degenerate hull") {
  const TriMesh grid = make_grid(6, 6, 1.0, 1.0);
  PadSpec p{"flat", "upper", {}, {}, {}};
  for (VertexId v = 0; v < grid.vertex_count(); ++v) p.vertices.push_back(v);
  for (VertexId v : {8u, 10u, 22u, 26u, 15u}) p.handles.push_back({"h" + std::to_string(v), v});
  const FatPadMap map = load_map(fixtures::map_json({p}), grid);
  CHECK(code_of([&] { hull_cage(grid, map, Region::Upper); }) == ErrorCode::DegenerateHull);
}

TEST_CASE("scale_cage on a flat patch") {
  const TriMesh grid = make_grid(10, 10, 2.0, 2.0);
  PadSpec p{"flat", "upper", {}, {}, {}};
  for (VertexId v = 0; v < grid.vertex_count(); ++v) p.vertices.push_back(v);
  const std::vector<VertexId> anchors = {24, 30, 90, 96, 60};  // 11 vertices per row
  for (VertexId v : anchors) p.handles.push_back({"h" + std::to_string(v), v});
  const FatPadMap map = load_map(fixtures::map_json({p}), grid);

  Cage fan;
  for (VertexId v : anchors) {
    fan.handle_binding["h" + std::to_string(v)] = static_cast<VertexId>(fan.vertices.size());
    fan.vertices.push_back(grid.position(v));
  }
  fan.triangles = {{4, 0, 1}, {4, 1, 3}, {4, 3, 2}, {4, 2, 0}};

  CageParams params;
  const Cage scaled = scale_cage(fan, grid, map, params);
  const double expected = 0.05 * grid.bbox_diagonal();
  for (std::size_t i = 0; i < scaled.vertices.size(); ++i) {
    CHECK(scaled.vertices[i].z() == expected);
    CHECK(scaled.vertices[i].head<2>() == fan.vertices[i].head<2>());
  }
  CHECK(scaled.offset == expected);

  params.alpha_base = 0.0;
  CHECK(code_of([&] { scale_cage(fan, grid, map, params); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lower region doubles the offset and axis masks restrict it") {
  const TriMesh sphere = make_icosphere(3, 1.0, Vec3::Zero());
  // Vertex whose normal is closest to (0.7, 0, 0.7).
  const Vec3 target = Vec3(0.7, 0, 0.7).normalized();
  VertexId nose = 0;
  for (VertexId v = 0; v < sphere.vertex_count(); ++v) {
    if (sphere.normal(v).dot(target) > sphere.normal(nose).dot(target)) nose = v;
  }
  CHECK(sphere.normal(nose).dot(target) > 0.99);
  PadSpec p{"all", "lower", {}, {}, {{"nose", nose}}};
  for (VertexId v = 0; v < sphere.vertex_count(); ++v) p.vertices.push_back(v);
  const FatPadMap map = load_map(fixtures::map_json({p}), sphere);

  Cage single;
  single.region = Region::Lower;
  single.vertices = {sphere.position(nose)};
  single.handle_binding["nose"] = 0;

  CageParams params;
  const double alpha = 2 * params.alpha_base * sphere.bbox_diagonal();
  const Cage plain = scale_cage(single, sphere, map, params);
  CHECK((plain.vertices[0] - sphere.position(nose) - alpha * sphere.normal(nose)).norm() < 1e-12);

  params.axis_masks["nose"] = Vec3::UnitZ();
  const Vec3 d = scale_cage(single, sphere, map, params).vertices[0] - sphere.position(nose);
  CHECK(d.x() == 0.0);
  CHECK(d.y() == 0.0);
  CHECK(d.z() == doctest::Approx(alpha).epsilon(1e-12));
}

TEST_CASE("duplicating a ring of 8 rim vertices") {
  const Cage fan = fan_cage(8, 0.1);
  const Cage dup = duplicate_and_fix_borders(fan, CageParams{});
  CHECK(dup.vertices.size() == fan.vertices.size() + 8);
  CHECK(dup.triangles.size() == fan.triangles.size() + 16);
  CHECK(dup.fixed.size() == 8);
  for (VertexId v : dup.fixed) {
    CHECK(v >= fan.vertices.size());
    CHECK_FALSE(dup.handle_at(v).has_value());
    // pushed up by the offset; rim corners take the miter of the octagon
    const Vec3 p = dup.vertices[v];
    CHECK(p.z() == doctest::Approx(0.1));
    CHECK(p.head<2>().norm() == doctest::Approx(1.0 + 0.1 / std::cos(kPi / 8)).epsilon(1e-12));
  }
  // Every duplicate edge lies exactly one offset outside its rim edge.
  const auto ring = boundary_loops(dup)[0];
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec3 mid = 0.5 * (dup.vertices[ring[i]] + dup.vertices[ring[(i + 1) % ring.size()]]);
    CHECK(mid.head<2>().norm() == doctest::Approx(std::cos(kPi / 8) + 0.1).epsilon(1e-12));
  }
  // The in-plane part of the offset direction does not drag the ring.
  Cage tilted = fan;
  for (Vec3& d : tilted.offset_directions) d = Vec3(0.6, 0, 0.8);
  const Cage tdup = duplicate_and_fix_borders(tilted, CageParams{});
  for (std::size_t i = 0; i < 8; ++i) {
    const Vec3 p = tdup.vertices[fan.vertices.size() + i];
    CHECK(p.z() == doctest::Approx(0.08));
    CHECK(p.x() + 0.06 == doctest::Approx((1.0 + 0.1 / std::cos(kPi / 8)) * std::cos(2 * kPi * i / 8)).epsilon(1e-12));
  }
  CHECK(dup.handle_binding == fan.handle_binding);
  for (VertexId v = 0; v < fan.vertices.size(); ++v) CHECK_FALSE(dup.is_fixed(v));
  // The strip keeps a single open loop: the duplicate ring.
  const auto loops = boundary_loops(dup);
  REQUIRE(loops.size() == 1);
  for (VertexId v : loops[0]) CHECK(dup.is_fixed(v));

  CHECK(code_of([&] { duplicate_and_fix_borders(fan_cage(8, 0.0), CageParams{}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("rim must be a single simple cycle") {
  Cage two = fan_cage(5, 0.1);
  const Cage other = fan_cage(5, 0.1);
  const auto base = static_cast<VertexId>(two.vertices.size());
  for (const Vec3& p : other.vertices) two.vertices.push_back(p + Vec3(5, 0, 0));
  for (Triangle t : other.triangles) {
    for (auto& v : t) v += base;
    two.triangles.push_back(t);
  }
  two.offset_directions.assign(two.vertices.size(), Vec3::UnitZ());
  CHECK(code_of([&] { duplicate_and_fix_borders(two, CageParams{}); }) == ErrorCode::InvalidTopology);

  // Two fans sharing only their apex: the boundary pinches there.
  Cage bowtie;
  bowtie.vertices = {{0, 0, 1}, {1, 0, 0}, {1, 1, 0}, {-1, 0, 0}, {-1, -1, 0}};
  bowtie.triangles = {{0, 1, 2}, {0, 3, 4}};
  bowtie.offset = 0.1;
  bowtie.offset_directions.assign(5, Vec3::UnitZ());
  CHECK(code_of([&] { duplicate_and_fix_borders(bowtie, CageParams{}); }) == ErrorCode::InvalidTopology);
  CHECK(code_of([&] { close_cage(two, make_icosphere(1, 1.0, Vec3::Zero()), CageParams{}); }) ==
        ErrorCode::InvalidTopology);
}

TEST_CASE("closing an open hemisphere") {
  const TriMesh sphere = make_icosphere(2, 1.0, Vec3::Zero());
  Cage hemi;
  std::map<VertexId, VertexId> remap;
  for (const Triangle& t : sphere.triangles()) {
    const Vec3 c = (sphere.position(t[0]) + sphere.position(t[1]) + sphere.position(t[2])) / 3;
    if (c.z() <= 0.05) continue;
    Triangle out;
    for (int k = 0; k < 3; ++k) {
      auto [it, inserted] = remap.emplace(t[k], static_cast<VertexId>(hemi.vertices.size()));
      if (inserted) hemi.vertices.push_back(sphere.position(t[k]));
      out[k] = it->second;
    }
    hemi.triangles.push_back(out);
  }
  REQUIRE(boundary_loops(hemi).size() == 1);
  const Cage closed = close_cage(hemi, sphere, CageParams{});
  CHECK(is_closed_manifold(closed));
  CHECK(signed_volume(closed) > 0);
  CHECK(boundary_loops(closed).empty());
  const TriMesh as_mesh(closed.vertices, closed.triangles);
  // Back ring (one per rim vertex) plus two apexes.
  const std::size_t rim = boundary_loops(hemi)[0].size();
  CHECK(closed.vertices.size() == hemi.vertices.size() + rim + 2);
  CHECK(closed.triangles.size() == hemi.triangles.size() + 3 * rim + 2);
  CHECK(static_cast<long>(closed.vertices.size()) - static_cast<long>(closed.triangles.size() * 3 / 2) +
            static_cast<long>(closed.triangles.size()) == 2);
  const double z_back = sphere.bounds().min.z() - CageParams{}.back_margin * sphere.bbox_diagonal();
  for (VertexId v = static_cast<VertexId>(hemi.vertices.size()); v < closed.vertices.size(); ++v) {
    CHECK(closed.is_fixed(v));
    CHECK_FALSE(closed.handle_at(v).has_value());
    CHECK(closed.vertices[v].z() == z_back);
  }
  // Each back ring vertex sits straight behind its rim vertex.
  const auto loop = boundary_loops(hemi)[0];
  for (VertexId v : loop) {
    const auto back = std::find_if(closed.vertices.begin() + hemi.vertices.size(), closed.vertices.end(),
                                   [&](const Vec3& p) { return p.head<2>() == hemi.vertices[v].head<2>(); });
    CHECK(back != closed.vertices.end());
  }
  const VertexId top = static_cast<VertexId>(hemi.vertices.size() + rim);
  CHECK(closed.vertices[top].y() > closed.vertices[top + 1].y());
}

TEST_CASE("intersection counter agrees with exhaustive pairs") {
  const fixtures::SphereFace scene;
  const Cage raw = hull_cage(scene.mesh, scene.map, Region::Upper);
  const auto subset = region_triangles(scene.mesh, scene.map, Region::Upper);
  const std::size_t n = count_intersections(raw, scene.mesh, subset);
  CHECK(n > 0);  // anchors lie on the surface
  CHECK(n == brute_force_intersections(raw, scene.mesh, subset));
}

TEST_CASE("both cages on a sphere face") {
  const fixtures::SphereFace scene;
  const CagePair cages = build_both_cages(scene.mesh, scene.map);
  std::set<HandleId> bound;
  for (Region r : {Region::Upper, Region::Lower}) {
    const Cage& c = cages[r];
    CAPTURE(to_string(r));
    const CageDiagnostics d = diagnose_cage(c, scene.mesh, scene.map);
    CHECK(d.closed_manifold);
    CHECK(d.euler_characteristic == 2);
    CHECK(d.signed_volume > 0);
    CHECK(d.intersections == 0);
    CHECK(d.outside_vertices.empty());
    CHECK(brute_force_intersections(c, scene.mesh, region_triangles(scene.mesh, scene.map, r)) == 0);
    for (const auto& [id, v] : c.handle_binding) {
      CHECK(bound.insert(id).second);
      CHECK(scene.map.handle(id).pad == scene.map.pad(scene.map.handle(id).pad).id);
      CHECK(scene.map.pad(scene.map.handle(id).pad).region == r);
      CHECK_FALSE(c.is_fixed(v));
    }
    // Fixed vertices are exactly the duplicates and the two closing vertices.
    CHECK(c.fixed.size() + c.handle_binding.size() == c.vertices.size());
  }
  CHECK(bound.size() == scene.map.handles().size());

  // Determinism.
  CHECK(build_cage(scene.mesh, scene.map, Region::Upper).hash() == cages.upper.hash());
}

TEST_CASE("a map without lower pads cannot build the lower cage") {
  const fixtures::SphereFace scene(0.15, /*lower_as_upper=*/true);
  CHECK_NOTHROW(build_cage(scene.mesh, scene.map, Region::Upper));
  CHECK(code_of([&] { build_both_cages(scene.mesh, scene.map); }) == ErrorCode::DegenerateHull);
}

TEST_CASE("escalation exhausts into a construction failure") {
  const fixtures::SphereFace scene;
  CageParams params;
  params.alpha_base = 1e-4;
  params.lateral_push = 0.0;
  params.max_iterations = 2;
  CHECK(code_of([&] { build_cage(scene.mesh, scene.map, Region::Upper, params); }) ==
        ErrorCode::ConstructionFailure);
}

TEST_CASE("cage file round trip") {
  const fixtures::SphereFace scene;
  const Cage c = build_cage(scene.mesh, scene.map, Region::Lower);
  const Cage back = load_cage(save_cage(c));
  CHECK(back.region == Region::Lower);
  CHECK(back.vertices == c.vertices);
  CHECK(back.triangles == c.triangles);
  CHECK(back.handle_binding == c.handle_binding);
  CHECK(back.fixed == c.fixed);
  CHECK(back.hash() == c.hash());

  CHECK(code_of([] { load_cage(R"({"region":"upper","vertices":[[0,0,0]],"triangles":[[0,0,3]],)"
                               R"("handle_binding":{},"fixed":[]})"); }) == ErrorCode::Validation);
  CHECK(code_of([] { load_cage("{"); }) == ErrorCode::Parse);
}
