#include "fatpad/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/Geometry>

namespace fatpad {

double orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a);
}

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double denom = d1 - d3;
    return denom > 0.0 ? Vec3(a + (d1 / denom) * ab) : a;
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double denom = d2 - d6;
    return denom > 0.0 ? Vec3(a + (d2 / denom) * ac) : a;
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double denom = (d4 - d3) + (d5 - d6);
    return denom > 0.0 ? Vec3(b + ((d4 - d3) / denom) * (c - b)) : b;
  }
  const double sum = va + vb + vc;
  if (!(sum > 0.0)) {
    // Degenerate triangle: fall back to the closest of its edges.
    Vec3 best = a;
    const auto seg = [&](const Vec3& s, const Vec3& e) {
      const Vec3 d = e - s;
      const double len2 = d.squaredNorm();
      const double t = len2 > 0.0 ? std::clamp((p - s).dot(d) / len2, 0.0, 1.0) : 0.0;
      const Vec3 q = s + t * d;
      if ((q - p).squaredNorm() < (best - p).squaredNorm()) best = q;
    };
    seg(a, b);
    seg(b, c);
    seg(c, a);
    return best;
  }
  const double v = vb / sum, w = vc / sum;
  return a + ab * v + ac * w;
}

// Van Oosterom & Strackee.
double signed_solid_angle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 x = a - p, y = b - p, z = c - p;
  const double lx = x.norm(), ly = y.norm(), lz = z.norm();
  const double num = x.dot(y.cross(z));
  const double den = lx * ly * lz + x.dot(y) * lz + x.dot(z) * ly + y.dot(z) * lx;
  return 2.0 * std::atan2(num, den);
}

namespace {

int dominant_axis(const Vec3& n) {
  const Vec3 a = n.cwiseAbs();
  if (a.x() >= a.y() && a.x() >= a.z()) return 0;
  return a.y() >= a.z() ? 1 : 2;
}

Vec2 drop_axis(const Vec3& p, int axis) {
  switch (axis) {
    case 0: return {p.y(), p.z()};
    case 1: return {p.z(), p.x()};
    default: return {p.x(), p.y()};
  }
}

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool point_in_triangle_2d(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  const double d1 = orient2d(a, b, p), d2 = orient2d(b, c, p), d3 = orient2d(c, a, p);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

bool on_segment_2d(const Vec2& p, const Vec2& a, const Vec2& b) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect_2d(const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) {
  const double o1 = orient2d(p, q, a), o2 = orient2d(p, q, b);
  const double o3 = orient2d(a, b, p), o4 = orient2d(a, b, q);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment_2d(a, p, q)) return true;
  if (o2 == 0 && on_segment_2d(b, p, q)) return true;
  if (o3 == 0 && on_segment_2d(p, a, b)) return true;
  if (o4 == 0 && on_segment_2d(q, a, b)) return true;
  return false;
}

bool coplanar_segment_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const int axis = dominant_axis((b - a).cross(c - a));
  const Vec2 p2 = drop_axis(p, axis), q2 = drop_axis(q, axis);
  const Vec2 a2 = drop_axis(a, axis), b2 = drop_axis(b, axis), c2 = drop_axis(c, axis);
  if (point_in_triangle_2d(p2, a2, b2, c2) || point_in_triangle_2d(q2, a2, b2, c2)) return true;
  return segments_intersect_2d(p2, q2, a2, b2) || segments_intersect_2d(p2, q2, b2, c2) ||
         segments_intersect_2d(p2, q2, c2, a2);
}

}  // namespace

bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c) {
  const double sp = orient3d(a, b, c, p), sq = orient3d(a, b, c, q);
  if ((sp > 0 && sq > 0) || (sp < 0 && sq < 0)) return false;
  if (sp == 0 && sq == 0) return coplanar_segment_triangle(p, q, a, b, c);
  const double s1 = orient3d(p, q, a, b), s2 = orient3d(p, q, b, c), s3 = orient3d(p, q, c, a);
  const bool neg = s1 < 0 || s2 < 0 || s3 < 0;
  const bool pos = s1 > 0 || s2 > 0 || s3 > 0;
  return !(neg && pos);
}

bool triangles_intersect(const std::array<Vec3, 3>& t, const std::array<Vec3, 3>& u) {
  for (int k = 0; k < 3; ++k) {
    if (segment_intersects_triangle(t[k], t[(k + 1) % 3], u[0], u[1], u[2])) return true;
    if (segment_intersects_triangle(u[k], u[(k + 1) % 3], t[0], t[1], t[2])) return true;
  }
  return false;
}

double box_distance_sq(const BoundingBox& box, const Vec3& p) {
  const Vec3 d = (box.min - p).cwiseMax(p - box.max).cwiseMax(Vec3::Zero());
  return d.squaredNorm();
}

bool boxes_overlap(const BoundingBox& a, const BoundingBox& b) {
  return (a.min.array() <= b.max.array()).all() && (b.min.array() <= a.max.array()).all();
}

TriangleBvh::TriangleBvh(const std::vector<Vec3>& positions, const std::vector<Triangle>& triangles,
                         std::vector<TriangleId> subset)
    : positions_(&positions), triangles_(&triangles), order_(std::move(subset)) {
  if (order_.empty()) {
    order_.resize(triangles.size());
    for (TriangleId t = 0; t < triangles.size(); ++t) order_[t] = t;
  }
  tri_box_.resize(triangles.size());
  centroid_.resize(triangles.size());
  for (TriangleId t : order_) {
    BoundingBox b;
    for (VertexId v : triangles[t]) b.extend(positions[v]);
    tri_box_[t] = b;
    centroid_[t] = b.center();
  }
  if (!order_.empty()) {
    nodes_.reserve(2 * order_.size());
    build(0, static_cast<std::uint32_t>(order_.size()));
  }
}

std::uint32_t TriangleBvh::build(std::uint32_t first, std::uint32_t count) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  BoundingBox box;
  for (std::uint32_t i = first; i < first + count; ++i) {
    box.extend(tri_box_[order_[i]].min);
    box.extend(tri_box_[order_[i]].max);
  }
  nodes_[id].box = box;
  if (count <= 4) {
    nodes_[id].first = first;
    nodes_[id].count = count;
    return id;
  }
  int axis = 0;
  const Vec3 ext = box.extent();
  if (ext.y() > ext[axis]) axis = 1;
  if (ext.z() > ext[axis]) axis = 2;
  const auto mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](TriangleId a, TriangleId b) {
                     if (centroid_[a][axis] != centroid_[b][axis])
                       return centroid_[a][axis] < centroid_[b][axis];
                     return a < b;
                   });
  const auto left = build(first, mid - first);
  const auto right = build(mid, first + count - mid);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::array<Vec3, 3> TriangleBvh::corners(TriangleId t) const {
  const auto& tri = (*triangles_)[t];
  return {(*positions_)[tri[0]], (*positions_)[tri[1]], (*positions_)[tri[2]]};
}

TriangleBvh::Hit TriangleBvh::closest(const Vec3& p) const {
  Hit best;
  if (nodes_.empty()) return best;
  double best_sq = kInfinity;
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  queue.emplace(box_distance_sq(nodes_[0].box, p), 0);
  while (!queue.empty()) {
    const auto [d2, id] = queue.top();
    queue.pop();
    if (d2 > best_sq) break;
    const Node& node = nodes_[id];
    if (node.left == kInvalidIndex) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const TriangleId t = order_[i];
        const auto c = corners(t);
        const Vec3 q = closest_point_on_triangle(p, c[0], c[1], c[2]);
        const double q2 = (q - p).squaredNorm();
        if (q2 < best_sq || (q2 == best_sq && t < best.triangle)) {
          best_sq = q2;
          best.point = q;
          best.triangle = t;
        }
      }
    } else {
      queue.emplace(box_distance_sq(nodes_[node.left].box, p), node.left);
      queue.emplace(box_distance_sq(nodes_[node.right].box, p), node.right);
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

void TriangleBvh::overlapping(const BoundingBox& box, std::vector<TriangleId>& out) const {
  if (nodes_.empty()) return;
  std::vector<std::uint32_t> stack{0};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (!boxes_overlap(node.box, box)) continue;
    if (node.left == kInvalidIndex) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
        if (boxes_overlap(tri_box_[order_[i]], box)) out.push_back(order_[i]);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
}

}  // namespace fatpad
