#include "fatpad/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fatpad/error.hpp"
#include "fatpad/spatial.hpp"

namespace fatpad {

namespace {

using Key = std::array<double, 3>;
Key key_of(const Vec3& p) { return {p.x(), p.y(), p.z()}; }

using TriKey = std::array<Key, 3>;
TriKey tri_key(const TriMesh& m, TriangleId t) {
  TriKey k{key_of(m.position(m.triangle(t)[0])), key_of(m.position(m.triangle(t)[1])),
           key_of(m.position(m.triangle(t)[2]))};
  std::sort(k.begin(), k.end());
  return k;
}

void require_nonempty(const TriMesh& m, const char* which) {
  if (m.empty() || m.triangle_count() == 0)
    throw Error(ErrorCode::EmptyMesh, std::string("mesh '") + which + "' has no triangles");
}

}  // namespace

double directed_rms(const TriMesh& from, const TriMesh& to, const HausdorffOptions& opts) {
  require_nonempty(from, "from");
  require_nonempty(to, "to");
  if (!(opts.samples_per_triangle > 0.0))
    throw Error(ErrorCode::InvalidArgument, "samples_per_triangle must be positive");

  // Samples on a triangle that also exists verbatim in `to` are exactly on
  // the target surface; skipping the closest-point query keeps identical
  // regions at an exact zero.
  std::set<TriKey> shared;
  for (TriangleId t = 0; t < to.triangle_count(); ++t) shared.insert(tri_key(to, t));

  std::vector<double> areas(from.triangle_count());
  for (TriangleId t = 0; t < from.triangle_count(); ++t) areas[t] = from.triangle_area(t);
  const double total_area = std::accumulate(areas.begin(), areas.end(), 0.0);
  const auto total_samples = static_cast<std::size_t>(
      std::max(1.0, std::round(opts.samples_per_triangle * static_cast<double>(from.triangle_count()))));

  TriangleBvh bvh(to.positions(), to.triangles());
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<bool> is_shared(from.triangle_count());
  for (TriangleId t = 0; t < from.triangle_count(); ++t) is_shared[t] = shared.count(tri_key(from, t)) > 0;

  double sum_sq = 0.0;
  std::size_t count = 0;
  const auto sample_on = [&](TriangleId t) {
    double r1 = unit(rng), r2 = unit(rng);
    if (is_shared[t]) {
      ++count;
      return;
    }
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const auto& tri = from.triangle(t);
    const Vec3 p = from.position(tri[0]) + r1 * (from.position(tri[1]) - from.position(tri[0])) +
                   r2 * (from.position(tri[2]) - from.position(tri[0]));
    const double d = bvh.closest(p).distance;
    sum_sq += d * d;
    ++count;
  };

  if (total_area > 0.0) {
    std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
    for (std::size_t s = 0; s < total_samples; ++s) sample_on(static_cast<TriangleId>(pick(rng)));
  } else {
    for (TriangleId t = 0; t < from.triangle_count(); ++t) sample_on(t);
  }
  return std::sqrt(sum_sq / static_cast<double>(count));
}

HausdorffRms hausdorff_rms(const TriMesh& a, const TriMesh& b, const HausdorffOptions& opts) {
  HausdorffRms r;
  r.a_to_b = directed_rms(a, b, opts);
  r.b_to_a = directed_rms(b, a, opts);
  r.symmetric = std::max(r.a_to_b, r.b_to_a);
  return r;
}

std::vector<double> vertex_distances_to_surface(const TriMesh& from, const TriMesh& to) {
  require_nonempty(to, "to");
  std::set<Key> to_vertices;
  for (const auto& p : to.positions()) to_vertices.insert(key_of(p));
  TriangleBvh bvh(to.positions(), to.triangles());
  std::vector<double> out(from.vertex_count(), 0.0);
  for (VertexId v = 0; v < from.vertex_count(); ++v) {
    const Vec3& p = from.position(v);
    out[v] = to_vertices.count(key_of(p)) ? 0.0 : bvh.closest(p).distance;
  }
  return out;
}

}  // namespace fatpad
