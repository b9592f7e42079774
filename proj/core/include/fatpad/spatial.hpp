#pragma once

#include <span>
#include <vector>

#include "fatpad/mesh.hpp"

namespace fatpad {

/// Sign of det[b-a, c-a, d-a]: positive when d lies on the side of triangle
/// (a,b,c) its right-hand normal points to.
double orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Signed solid angle subtended by triangle (a,b,c) at p; positive when p is
/// behind the triangle (opposite its right-hand normal).
double signed_solid_angle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

bool segment_intersects_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b,
                                 const Vec3& c);

/// Closed-set test: touching counts as intersecting.
bool triangles_intersect(const std::array<Vec3, 3>& t, const std::array<Vec3, 3>& u);

/// Axis-aligned bounding-volume hierarchy over a subset of mesh triangles.
class TriangleBvh {
 public:
  TriangleBvh(const std::vector<Vec3>& positions, const std::vector<Triangle>& triangles,
              std::vector<TriangleId> subset = {});

  struct Hit {
    double distance = kInfinity;
    Vec3 point = Vec3::Zero();
    TriangleId triangle = kInvalidIndex;
  };
  Hit closest(const Vec3& p) const;

  /// Triangles whose bounding boxes overlap `box`.
  void overlapping(const BoundingBox& box, std::vector<TriangleId>& out) const;

  bool empty() const { return order_.empty(); }

 private:
  struct Node {
    BoundingBox box;
    std::uint32_t left = kInvalidIndex;  // children or leaf range [first, first+count)
    std::uint32_t right = kInvalidIndex;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
  };
  std::uint32_t build(std::uint32_t first, std::uint32_t count);
  std::array<Vec3, 3> corners(TriangleId t) const;

  const std::vector<Vec3>* positions_;
  const std::vector<Triangle>* triangles_;
  std::vector<TriangleId> order_;
  std::vector<BoundingBox> tri_box_;
  std::vector<Vec3> centroid_;
  std::vector<Node> nodes_;
};

double box_distance_sq(const BoundingBox& box, const Vec3& p);
bool boxes_overlap(const BoundingBox& a, const BoundingBox& b);

}  // namespace fatpad
