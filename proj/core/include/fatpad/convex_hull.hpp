#pragma once

#include <vector>

#include "fatpad/types.hpp"

namespace fatpad {

struct ConvexHull {
  /// Outward-oriented faces indexing the input points, each rotated so its
  /// smallest index comes first, sorted lexicographically.
  std::vector<Triangle> faces;
  /// Input points that are not hull vertices: interior points and points
  /// lying on a hull face or edge.
  std::vector<std::uint32_t> excluded;
};

/// Incremental 3D convex hull. Throws DegenerateHull for fewer than four
/// points or when all points are (nearly) coplanar.
ConvexHull convex_hull(const std::vector<Vec3>& points);

}  // namespace fatpad
