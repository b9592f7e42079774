#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fatpad/error.hpp"
#include "fatpad/geodesic.hpp"

namespace fatpad::detail {

struct SurfaceContext {
  explicit SurfaceContext(TriMesh m);

  TriMesh mesh;
  MeshTopology topo;
  std::vector<double> edge_length;
  /// Saddle, flat or boundary vertices: geodesics may bend around them, so
  /// they re-emit distance as pseudo-sources.
  std::vector<bool> pseudo_source;
  double scale = 1.0;

  /// Corner of triangle t that is not on edge e.
  VertexId opposite_vertex(TriangleId t, EdgeId e) const;
  /// The edge of triangle t joining a and b.
  EdgeId triangle_edge(TriangleId t, VertexId a, VertexId b) const;
};

struct StoredWindow {
  EdgeId edge = 0;
  TriangleId towards = kInvalidIndex;
  double b0 = 0.0, b1 = 0.0;
  double sx = 0.0, sy = 0.0;
  double d = 0.0;

  double eval(double x) const { return d + std::hypot(x - sx, sy); }
};

class FieldEvaluator {
 public:
  virtual ~FieldEvaluator() = default;
  virtual double at(const SurfacePoint& p) const = 0;
  virtual double at_edge(VertexId a, VertexId b, double t) const = 0;
};

struct ExactResult {
  std::vector<double> vertex_dist;
  std::vector<std::uint32_t> edge_offset;  // size edges+1
  std::vector<StoredWindow> windows;       // grouped by edge, sorted by b0
};

ExactResult run_exact(const SurfaceContext& ctx, VertexId source, double max_distance);

struct DijkstraResult {
  int refinement = 0;
  std::vector<double> vertex_dist;
  std::vector<double> edge_node_dist;  // edges * refinement
};

DijkstraResult run_refined_dijkstra(const SurfaceContext& ctx, VertexId source, int refinement);

std::shared_ptr<const FieldEvaluator> make_exact_evaluator(
    std::shared_ptr<const SurfaceContext> ctx, ExactResult result);
std::shared_ptr<const FieldEvaluator> make_dijkstra_evaluator(
    std::shared_ptr<const SurfaceContext> ctx, DijkstraResult result);

struct FieldAccess {
  static GeodesicField make(VertexId source, GeodesicMethod method, std::vector<double> distances,
                            std::shared_ptr<const FieldEvaluator> evaluator) {
    GeodesicField f;
    f.source_ = source;
    f.method_ = method;
    f.distances_ = std::move(distances);
    f.evaluator_ = std::move(evaluator);
    return f;
  }
  static const FieldEvaluator* evaluator(const GeodesicField& f) { return f.evaluator_.get(); }
  static std::shared_ptr<const FieldEvaluator> evaluator_ptr(const GeodesicField& f) { return f.evaluator_; }
};

/// Access to the raw data behind an evaluator, for serialization.
const ExactResult* exact_data(const FieldEvaluator& eval);
const DijkstraResult* dijkstra_data(const FieldEvaluator& eval);

}  // namespace fatpad::detail
