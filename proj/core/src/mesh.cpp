#include "fatpad/mesh.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "fatpad/error.hpp"
#include "fatpad/hash.hpp"

namespace fatpad {

TriMesh::TriMesh(std::vector<Vec3> positions, std::vector<Triangle> triangles)
    : positions_(std::move(positions)), triangles_(std::move(triangles)) {
  const auto n = positions_.size();
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (VertexId v : tri) {
      if (v >= n)
        throw Error(ErrorCode::InvalidTopology, "triangle " + std::to_string(t) +
                                                    " references vertex " + std::to_string(v) +
                                                    " but mesh has " + std::to_string(n));
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw Error(ErrorCode::InvalidTopology,
                  "triangle " + std::to_string(t) + " repeats a vertex index");
  }
  for (const auto& p : positions_) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite vertex position");
    bounds_.extend(p);
  }
  normals_ = compute_vertex_normals(positions_, triangles_);
}

Vec3 TriMesh::triangle_cross(TriangleId t) const {
  const auto& tri = triangles_[t];
  const Vec3& a = positions_[tri[0]];
  return (positions_[tri[1]] - a).cross(positions_[tri[2]] - a);
}

Vec3 TriMesh::point(const SurfacePoint& p) const {
  const auto& tri = triangles_.at(p.triangle);
  return p.barycentric[0] * positions_[tri[0]] + p.barycentric[1] * positions_[tri[1]] +
         p.barycentric[2] * positions_[tri[2]];
}

TriMesh TriMesh::with_positions(std::vector<Vec3> positions) const {
  if (positions.size() != positions_.size())
    throw Error(ErrorCode::TopologyMismatch, "position count differs from mesh vertex count");
  return TriMesh(std::move(positions), triangles_);
}

NormalField compute_vertex_normals(const std::vector<Vec3>& positions,
                                   const std::vector<Triangle>& triangles) {
  NormalField field;
  field.normals.assign(positions.size(), Vec3::Zero());
  // Zero-area triangles contribute a zero cross product and drop out.
  for (const auto& tri : triangles) {
    const Vec3 cross =
        (positions[tri[1]] - positions[tri[0]]).cross(positions[tri[2]] - positions[tri[0]]);
    for (VertexId v : tri) field.normals[v] += cross;
  }
  for (VertexId v = 0; v < positions.size(); ++v) {
    const double len = field.normals[v].norm();
    if (len > 0.0 && std::isfinite(len)) {
      field.normals[v] /= len;
    } else {
      field.normals[v].setZero();
      field.isolated.push_back(v);
    }
  }
  return field;
}

std::string topology_fingerprint(const TriMesh& mesh) {
  Fnv1a64 h;
  h.update("topology");
  h.update_u64(mesh.vertex_count());
  h.update_u64(mesh.triangle_count());
  for (const auto& tri : mesh.triangles())
    for (VertexId v : tri) h.update_u64(v);
  return to_hex(h.digest());
}

std::string content_hash(const TriMesh& mesh) {
  Fnv1a64 h;
  h.update("content");
  h.update_u64(mesh.vertex_count());
  for (const auto& p : mesh.positions())
    for (int k = 0; k < 3; ++k) h.update_f64(p[k]);
  h.update_u64(mesh.triangle_count());
  for (const auto& tri : mesh.triangles())
    for (VertexId v : tri) h.update_u64(v);
  return to_hex(h.digest());
}

}  // namespace fatpad
