#include <doctest.h>

#include <cmath>

#include "fatpad/geodesic.hpp"
#include "fatpad/primitives.hpp"

using namespace fatpad;

namespace {

VertexId nearest_vertex(const TriMesh& mesh, const Vec3& p) {
  VertexId best = 0;
  for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
    if ((mesh.position(v) - p).squaredNorm() < (mesh.position(best) - p).squaredNorm()) best = v;
  }
  return best;
}

}  // namespace

TEST_CASE("flat grid distances are Euclidean") {
  const TriMesh grid = make_grid(12, 9, 1.2, 0.9);
  const GeodesicSolver solver(grid);
  for (VertexId src : {VertexId(0), VertexId(57), nearest_vertex(grid, {0.6, 0.45, 0})}) {
    const GeodesicField f = solver.solve_from(src);
    for (VertexId v = 0; v < grid.vertex_count(); ++v) {
      CHECK(f[v] == doctest::Approx((grid.position(v) - grid.position(src)).norm()).epsilon(1e-9));
    }
    // points on edges and inside triangles
    for (TriangleId t = 0; t < grid.triangle_count(); t += 7) {
      const SurfacePoint p{t, Vec3(0.2, 0.3, 0.5)};
      CHECK(f.at(p) == doctest::Approx((grid.point(p) - grid.position(src)).norm()).epsilon(1e-9));
    }
  }
}

TEST_CASE("point source on a flat grid") {
  const TriMesh grid = make_grid(8, 8, 1.0, 1.0);
  const GeodesicSolver solver(grid);
  const SurfacePoint interior{37, Vec3(0.25, 0.35, 0.4)};
  const SurfacePoint on_edge{20, Vec3(0.3, 0.7, 0.0)};
  for (const SurfacePoint& sp : {interior, on_edge}) {
    const Vec3 s = grid.point(sp);
    const GeodesicField f = solver.solve_from_point(sp);
    CHECK(f.source() == kInvalidIndex);
    for (VertexId v = 0; v < grid.vertex_count(); ++v) {
      CHECK(f[v] == doctest::Approx((grid.position(v) - s).norm()).epsilon(1e-9));
    }
    const SurfacePoint q{sp.triangle, Vec3(0.6, 0.2, 0.2)};
    CHECK(f.at(q) == doctest::Approx((grid.point(q) - s).norm()).epsilon(1e-9));
    const Triangle& tri = grid.triangle(sp.triangle);
    CHECK(f.at_edge(tri[0], tri[1], 0.4) ==
          doctest::Approx((0.6 * grid.position(tri[0]) + 0.4 * grid.position(tri[1]) - s).norm()).epsilon(1e-9));
  }
}

TEST_CASE("antipodal distance on an icosphere is close to pi") {
  const TriMesh sphere = make_icosphere(3);
  const VertexId a = nearest_vertex(sphere, {0, 0, 1});
  const VertexId b = nearest_vertex(sphere, -sphere.position(a));
  const GeodesicField f = solve_from(sphere, a);
  CHECK(std::abs(f[b] - kPi) / kPi < 0.01);
  // never shorter than the great-circle distance (mesh is inscribed)... and not
  // longer than the refined graph distance
  const GeodesicField g = oracle_refined_dijkstra(sphere, a, 4);
  for (VertexId v = 0; v < sphere.vertex_count(); ++v) CHECK(f[v] <= g[v] + 1e-9);
}

TEST_CASE("exact distances are symmetric") {
  const TriMesh sphere = make_uv_sphere(9, 14, 1.0);
  const GeodesicSolver solver(sphere);
  const VertexId pairs[][2] = {{3, 77}, {0, 60}, {15, 100}, {5, 6}};
  for (const auto& pr : pairs) {
    const double ab = solver.solve_from(pr[0])[pr[1]];
    const double ba = solver.solve_from(pr[1])[pr[0]];
    CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
  }
}

TEST_CASE("exact distances track the refined graph on a sphere") {
  const TriMesh sphere = make_uv_sphere(20, 25, 1.0);
  const GeodesicSolver solver(sphere);
  const GeodesicField f = solver.solve_from(7);
  const GeodesicField g = solver.oracle_refined_dijkstra(7, 8);
  double worst = 0.0;
  for (VertexId v = 0; v < sphere.vertex_count(); ++v) {
    if (v == 7) continue;
    CHECK(f[v] <= g[v] + 1e-9);
    worst = std::max(worst, (g[v] - f[v]) / f[v]);
  }
  CHECK(worst < 0.02);
}

TEST_CASE("distance cutoff keeps values below the cutoff exact") {
  const TriMesh sphere = make_icosphere(2);
  const GeodesicSolver solver(sphere);
  const GeodesicField full = solver.solve_from(0);
  GeodesicOptions opts;
  opts.max_distance = 1.0;
  const GeodesicField part = solver.solve_from(0, opts);
  for (VertexId v = 0; v < sphere.vertex_count(); ++v) {
    if (full[v] <= 1.0) CHECK(part[v] == doctest::Approx(full[v]).epsilon(1e-12));
  }
}

TEST_CASE("other components are unreachable") {
  const TriMesh a = make_icosphere(1);
  const TriMesh b = make_icosphere(1, 1.0, Vec3(5, 0, 0));
  std::vector<Vec3> p = a.positions();
  p.insert(p.end(), b.positions().begin(), b.positions().end());
  std::vector<Triangle> t = a.triangles();
  for (Triangle tri : b.triangles()) {
    for (VertexId& v : tri) v += static_cast<VertexId>(a.vertex_count());
    t.push_back(tri);
  }
  const TriMesh both(p, t);
  const GeodesicField f = solve_from(both, 0);
  CHECK(f.reachable(1));
  CHECK_FALSE(f.reachable(static_cast<VertexId>(a.vertex_count())));
}

TEST_CASE("saddle-rich surface stays below the refined graph") {
  // Regression: a window whose projected range missed the target edge used to
  // spill over the whole edge, giving distances shorter than any real path.
  const TriMesh grid = make_grid(10, 10, 2.0, 2.0);
  std::vector<Vec3> p = grid.positions();
  for (Vec3& v : p) v.z() = 0.25 * std::sin(4 * v.x()) * std::cos(3 * v.y());
  const TriMesh wavy(p, grid.triangles());
  const GeodesicSolver solver(wavy);
  const GeodesicField f = solver.solve_from(0);
  const GeodesicField g = solver.oracle_refined_dijkstra(0, 16);
  for (VertexId v = 1; v < wavy.vertex_count(); ++v) {
    CHECK(f[v] <= g[v] + 1e-12);
    CHECK(f[v] >= 0.99 * g[v]);
  }
  // value frozen from an independent exact (MMP) implementation
  CHECK(f[38] == doctest::Approx(1.2527699134).epsilon(1e-9));
}
