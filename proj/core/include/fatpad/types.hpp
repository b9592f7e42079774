#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fatpad {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

using VertexId = std::uint32_t;
using TriangleId = std::uint32_t;
using EdgeId = std::uint32_t;

using Triangle = std::array<VertexId, 3>;

inline constexpr std::uint32_t kInvalidIndex = std::numeric_limits<std::uint32_t>::max();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

struct BoundingBox {
  Vec3 min = Vec3::Constant(kInfinity);
  Vec3 max = Vec3::Constant(-kInfinity);

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool empty() const { return (min.array() > max.array()).any(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  double diagonal() const { return empty() ? 0.0 : extent().norm(); }
};

/// A point on a triangle, located by barycentric weights of its three corners.
struct SurfacePoint {
  TriangleId triangle = 0;
  Vec3 barycentric = Vec3(1.0, 0.0, 0.0);
};

/// Upper or lower part of the face; each part gets its own cage.
enum class Region { Upper, Lower };

}  // namespace fatpad
