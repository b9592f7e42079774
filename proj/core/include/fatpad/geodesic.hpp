#pragma once

#include <memory>
#include <vector>

#include "fatpad/mesh.hpp"
#include "fatpad/topology.hpp"

namespace fatpad {

enum class GeodesicMethod {
  Exact,            ///< window propagation (polyhedral exact)
  RefinedDijkstra,  ///< graph over edge subdivision points; upper bound
};

struct GeodesicOptions {
  GeodesicMethod method = GeodesicMethod::Exact;
  /// Subdivision points per edge for RefinedDijkstra.
  int refinement = 8;
  /// Propagation stops past this distance. Values up to it stay exact; beyond
  /// it vertices may be left unreachable.
  double max_distance = kInfinity;
};

namespace detail {
struct SurfaceContext;
class FieldEvaluator;
struct FieldAccess;
}  // namespace detail

/// Geodesic distances from one source over the surface. Vertices in other
/// connected components are unreachable (infinite distance).
class GeodesicField {
 public:
  GeodesicField() = default;

  /// kInvalidIndex when the source is an arbitrary surface point.
  VertexId source() const { return source_; }
  GeodesicMethod method() const { return method_; }
  const std::vector<double>& distances() const { return distances_; }
  double operator[](VertexId v) const { return distances_[v]; }
  bool reachable(VertexId v) const { return distances_[v] < kInfinity; }

  /// Distance at an arbitrary point of the mesh the field was solved on.
  double at(const SurfacePoint& p) const;
  /// Distance at the point (1 - t) * a + t * b of mesh edge (a, b).
  double at_edge(VertexId a, VertexId b, double t) const;

  /// True when point queries are available (false for fields rebuilt from a
  /// distances-only record).
  bool has_evaluator() const { return evaluator_ != nullptr; }

 private:
  friend struct detail::FieldAccess;

  VertexId source_ = kInvalidIndex;
  GeodesicMethod method_ = GeodesicMethod::Exact;
  std::vector<double> distances_;
  std::shared_ptr<const detail::FieldEvaluator> evaluator_;
};

/// Holds a mesh with its adjacency so many sources can be solved without
/// rebuilding. Thread-safe for concurrent solves.
class GeodesicSolver {
 public:
  explicit GeodesicSolver(const TriMesh& mesh);

  const TriMesh& mesh() const;
  const MeshTopology& topology() const;

  GeodesicField solve_from(VertexId source, const GeodesicOptions& opts = {}) const;

  /// Sources off the vertex set are handled by splitting the containing
  /// triangle (or edge) with a temporary vertex.
  GeodesicField solve_from_point(const SurfacePoint& point, const GeodesicOptions& opts = {}) const;

  /// Dijkstra over vertices plus `refinement` points per edge, connected by
  /// all chords inside each triangle. Converges from above to the exact
  /// distance as refinement grows.
  GeodesicField oracle_refined_dijkstra(VertexId source, int refinement) const;

  const std::shared_ptr<const detail::SurfaceContext>& context() const { return ctx_; }

 private:
  std::shared_ptr<const detail::SurfaceContext> ctx_;
};

GeodesicField solve_from(const TriMesh& mesh, VertexId source, const GeodesicOptions& opts = {});
GeodesicField solve_from_point(const TriMesh& mesh, const SurfacePoint& point,
                               const GeodesicOptions& opts = {});
GeodesicField oracle_refined_dijkstra(const TriMesh& mesh, VertexId source, int refinement);

}  // namespace fatpad
