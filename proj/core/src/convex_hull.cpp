#include "fatpad/convex_hull.hpp"

#include <algorithm>
#include <map>

#include "fatpad/error.hpp"
#include "fatpad/spatial.hpp"

namespace fatpad {

ConvexHull convex_hull(const std::vector<Vec3>& points) {
  const std::size_t n = points.size();
  if (n < 4) throw Error(ErrorCode::DegenerateHull, "convex hull needs at least 4 points");
  BoundingBox box;
  for (const Vec3& p : points) box.extend(p);
  const double scale = box.diagonal();
  if (!(scale > 0.0)) throw Error(ErrorCode::DegenerateHull, "all hull points coincide");
  const double eps_len = 1e-9 * scale;
  const double eps_vol = 1e-9 * scale * scale * scale;

  // Initial tetrahedron from extreme points, chosen deterministically.
  std::uint32_t i0 = 0;
  for (std::uint32_t i = 1; i < n; ++i) {
    if (std::lexicographical_compare(points[i].data(), points[i].data() + 3, points[i0].data(),
                                     points[i0].data() + 3)) {
      i0 = i;
    }
  }
  auto farthest = [&](auto&& measure) {
    std::uint32_t best = 0;
    double best_v = -1.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double v = measure(points[i]);
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    return std::make_pair(best, best_v);
  };
  const auto [i1, d1] = farthest([&](const Vec3& p) { return (p - points[i0]).norm(); });
  if (d1 <= eps_len) throw Error(ErrorCode::DegenerateHull, "all hull points coincide");
  const Vec3 axis = (points[i1] - points[i0]).normalized();
  const auto [i2, d2] = farthest([&](const Vec3& p) { return (p - points[i0]).cross(axis).norm(); });
  if (d2 <= eps_len) throw Error(ErrorCode::DegenerateHull, "hull points are collinear");
  const auto [i3, d3] = farthest(
      [&](const Vec3& p) { return std::abs(orient3d(points[i0], points[i1], points[i2], p)); });
  if (d3 <= eps_vol) throw Error(ErrorCode::DegenerateHull, "hull points are coplanar");

  std::vector<Triangle> faces;
  std::vector<char> alive;
  auto add_face = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    faces.push_back({a, b, c});
    alive.push_back(1);
  };
  if (orient3d(points[i0], points[i1], points[i2], points[i3]) > 0.0) {
    add_face(i0, i2, i1);
    add_face(i0, i1, i3);
    add_face(i1, i2, i3);
    add_face(i2, i0, i3);
  } else {
    add_face(i0, i1, i2);
    add_face(i0, i3, i1);
    add_face(i1, i3, i2);
    add_face(i2, i3, i0);
  }

  std::vector<char> on_hull(n, 0);
  for (std::uint32_t i : {i0, i1, i2, i3}) on_hull[i] = 1;
  std::vector<std::size_t> visible;
  for (std::uint32_t p = 0; p < n; ++p) {
    if (on_hull[p]) continue;
    visible.clear();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!alive[f]) continue;
      const Triangle& t = faces[f];
      // Points on a face plane are not "visible": they are excluded rather
      // than creating coplanar sliver faces.
      if (orient3d(points[t[0]], points[t[1]], points[t[2]], points[p]) > eps_vol) visible.push_back(f);
    }
    if (visible.empty()) continue;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
    for (std::size_t f : visible) {
      const Triangle& t = faces[f];
      for (int k = 0; k < 3; ++k) edges[{t[k], t[(k + 1) % 3]}] = 1;
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> horizon;
    for (const auto& [e, unused] : edges) {
      if (!edges.count({e.second, e.first})) horizon.push_back(e);
    }
    for (std::size_t f : visible) alive[f] = 0;
    for (const auto& [a, b] : horizon) add_face(a, b, p);
    on_hull[p] = 1;
  }

  ConvexHull hull;
  std::vector<char> used(n, 0);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!alive[f]) continue;
    Triangle t = faces[f];
    std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
    hull.faces.push_back(t);
    for (auto v : t) used[v] = 1;
  }
  std::sort(hull.faces.begin(), hull.faces.end());
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!used[i]) hull.excluded.push_back(i);
  }
  return hull;
}

}  // namespace fatpad
