#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fatpad/fatpad_map.hpp"
#include "fatpad/geodesic.hpp"
#include "fatpad/geodesic_cache.hpp"

namespace fatpad {

struct AttenuationParams {
  /// Direction filter: a candidate i is kept when cos(angle(h->i, h->v)),
  /// measured in the handle's tangent plane, exceeds 1 - direction_epsilon.
  double direction_epsilon = 1e-4;
  /// Between-ness test d(h,v) < d(h,i) on straight-line instead of geodesic
  /// distances.
  bool euclidean_betweenness = false;
  /// build_weight_matrix fails when more than this fraction of pad vertices
  /// has no usable border intersection.
  double max_unresolved_fraction = 0.01;
  GeodesicOptions geodesic;
  /// Worker threads for build_all_weight_matrices (0 = default).
  unsigned threads = 0;
};

/// Where the handle-to-vertex direction leaves the pad.
struct IntersectionResult {
  SurfacePoint point;
  Vec3 position = Vec3::Zero();
  VertexId edge_a = kInvalidIndex;  // border segment containing the point
  VertexId edge_b = kInvalidIndex;
  double t = 0.0;                   // position along the segment from edge_a
  double d_ih = 0.0;
  std::size_t candidates_considered = 0;
  bool used_pad_normal = false;  // first plane gave nothing; retried with the pad's mean normal
};

/// Sparse per-handle weights; vertices absent from `entries` weigh 0.
struct WeightMatrix {
  HandleId handle;
  std::vector<std::pair<VertexId, double>> entries;  // sorted by vertex

  double weight(VertexId v) const;
  bool operator==(const WeightMatrix&) const = default;
};

struct WeightReport {
  /// Vertices that kept weight 0 because no border intersection survived.
  std::vector<std::pair<HandleId, VertexId>> unresolved;
  std::size_t pad_normal_retries = 0;
};

/// Quadratic attenuation (d_vh - d_ih)^2 / d_ih^2 clamped to [0, 1].
double attenuation_weight(double d_vh, double d_ih);

/// Per-mesh state shared by all handles: geodesic solver, distance cache and
/// pad border loops.
class AttenuationEngine {
 public:
  AttenuationEngine(const TriMesh& mesh, const FatPadMap& map, AttenuationParams params = {},
                    std::shared_ptr<GeodesicCache> cache = nullptr);

  const AttenuationParams& params() const { return params_; }
  const GeodesicSolver& solver() const { return *solver_; }
  const std::vector<std::vector<VertexId>>& border_loops(std::string_view pad) const;

  /// Geodesic field of the handle's anchor (memoized).
  GeodesicField handle_field(const Handle& h) const;

  IntersectionResult border_intersection(const Handle& h, VertexId v) const;
  double compute_weight(const Handle& h, VertexId v) const;
  WeightMatrix build_weight_matrix(const Handle& h, WeightReport* report = nullptr) const;

 private:
  struct Candidate {
    std::size_t loop = 0, segment = 0;
    double t = 0.0;
    Vec3 position;
  };
  std::vector<Candidate> plane_candidates(const Handle& h, const Vec3& normal, VertexId v,
                                          const GeodesicField& hf) const;
  IntersectionResult intersection_with(const Handle& h, VertexId v, const GeodesicField& hf) const;
  double compute_weight_with(const Handle& h, VertexId v, const GeodesicField& hf, bool* retried) const;
  SurfacePoint edge_point(VertexId a, VertexId b, double t) const;

  const TriMesh& mesh_;
  const FatPadMap& map_;
  AttenuationParams params_;
  std::shared_ptr<GeodesicSolver> solver_;
  std::shared_ptr<GeodesicCache> cache_;
  std::map<PadId, std::vector<std::vector<VertexId>>, std::less<>> loops_;
  std::map<PadId, Vec3, std::less<>> pad_normal_;
};

/// One matrix per handle of the map, computed in parallel and ordered by
/// handle id.
std::vector<WeightMatrix> build_all_weight_matrices(const AttenuationEngine& engine, const FatPadMap& map,
                                                    WeightReport* report = nullptr);

std::string save_weights(const std::vector<WeightMatrix>& matrices, const TriMesh& mesh, const FatPadMap& map);
/// Throws StaleCache when the file was produced for another mesh or map.
std::vector<WeightMatrix> load_weights(std::string_view text, const TriMesh& mesh, const FatPadMap& map);

}  // namespace fatpad
