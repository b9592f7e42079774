#pragma once

#include <string>
#include <vector>

#include "fatpad/types.hpp"

namespace fatpad {

/// Area-weighted vertex normals. Vertices without a non-degenerate incident
/// triangle get a zero vector and are listed in `isolated`.
struct NormalField {
  std::vector<Vec3> normals;
  std::vector<VertexId> isolated;
};

/// Indexed triangle surface. Immutable after construction; the constructor
/// validates indices and rejects triangles that repeat a vertex.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles);

  std::size_t vertex_count() const { return positions_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  bool empty() const { return positions_.empty(); }

  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(VertexId v) const { return positions_[v]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Triangle& triangle(TriangleId t) const { return triangles_[t]; }

  const std::vector<Vec3>& vertex_normals() const { return normals_.normals; }
  const Vec3& normal(VertexId v) const { return normals_.normals[v]; }
  const std::vector<VertexId>& isolated_vertices() const { return normals_.isolated; }

  const BoundingBox& bounds() const { return bounds_; }
  double bbox_diagonal() const { return bounds_.diagonal(); }

  /// Unnormalized face normal (length = 2 * area).
  Vec3 triangle_cross(TriangleId t) const;
  double triangle_area(TriangleId t) const { return 0.5 * triangle_cross(t).norm(); }
  Vec3 point(const SurfacePoint& p) const;

  /// Same connectivity, new positions.
  TriMesh with_positions(std::vector<Vec3> positions) const;

 private:
  std::vector<Vec3> positions_;
  std::vector<Triangle> triangles_;
  NormalField normals_;
  BoundingBox bounds_;
};

NormalField compute_vertex_normals(const std::vector<Vec3>& positions,
                                   const std::vector<Triangle>& triangles);
inline NormalField compute_vertex_normals(const TriMesh& mesh) {
  return compute_vertex_normals(mesh.positions(), mesh.triangles());
}

/// Hash of (vertex count, triangle list): identifies a mesh topology
/// independently of vertex positions.
std::string topology_fingerprint(const TriMesh& mesh);

/// Hash of positions and triangles.
std::string content_hash(const TriMesh& mesh);

}  // namespace fatpad
