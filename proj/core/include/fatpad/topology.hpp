#pragma once

#include <span>
#include <vector>

#include "fatpad/mesh.hpp"

namespace fatpad {

struct Edge {
  VertexId v0 = 0;  // v0 < v1
  VertexId v1 = 0;
  std::array<TriangleId, 2> faces{kInvalidIndex, kInvalidIndex};

  bool boundary() const { return faces[1] == kInvalidIndex; }
  VertexId other(VertexId v) const { return v == v0 ? v1 : v0; }
  TriangleId other_face(TriangleId f) const { return faces[0] == f ? faces[1] : faces[0]; }
};

/// Edge/vertex adjacency for a TriMesh. Edges are canonical (v0 < v1) and
/// numbered in lexicographic order, so ids are deterministic.
class MeshTopology {
 public:
  explicit MeshTopology(const TriMesh& mesh);

  std::size_t vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  /// kInvalidIndex when a and b are not adjacent.
  EdgeId find_edge(VertexId a, VertexId b) const;

  /// Edge k of a triangle joins corners k and k+1.
  const std::array<EdgeId, 3>& triangle_edges(TriangleId t) const { return tri_edges_[t]; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {nbr_.data() + nbr_offset_[v], nbr_.data() + nbr_offset_[v + 1]};
  }
  std::span<const EdgeId> vertex_edges(VertexId v) const {
    return {nbr_edge_.data() + nbr_offset_[v], nbr_edge_.data() + nbr_offset_[v + 1]};
  }
  std::span<const TriangleId> vertex_triangles(VertexId v) const {
    return {vtri_.data() + vtri_offset_[v], vtri_.data() + vtri_offset_[v + 1]};
  }

  bool is_boundary_vertex(VertexId v) const { return boundary_vertex_[v]; }
  /// Edges with more than two incident triangles.
  const std::vector<EdgeId>& nonmanifold_edges() const { return nonmanifold_; }
  bool edge_manifold() const { return nonmanifold_.empty(); }

  /// Connected component label per vertex (isolated vertices get their own).
  std::vector<std::uint32_t> components() const;

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::array<EdgeId, 3>> tri_edges_;
  std::vector<std::uint32_t> nbr_offset_;
  std::vector<VertexId> nbr_;
  std::vector<EdgeId> nbr_edge_;
  std::vector<std::uint32_t> vtri_offset_;
  std::vector<TriangleId> vtri_;
  std::vector<bool> boundary_vertex_;
  std::vector<EdgeId> nonmanifold_;
};

}  // namespace fatpad
