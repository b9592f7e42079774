#include <algorithm>
#include <cmath>
#include <map>

#include "geodesic_internal.hpp"

namespace fatpad {
namespace detail {

SurfaceContext::SurfaceContext(TriMesh m) : mesh(std::move(m)), topo(mesh) {
  const auto& edges = topo.edges();
  edge_length.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    edge_length[e] = (mesh.position(edges[e].v1) - mesh.position(edges[e].v0)).norm();
  }
  std::vector<double> angle(mesh.vertex_count(), 0.0);
  for (const Triangle& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = mesh.position(t[(k + 1) % 3]) - mesh.position(t[k]);
      const Vec3 b = mesh.position(t[(k + 2) % 3]) - mesh.position(t[k]);
      angle[t[k]] += std::atan2(a.cross(b).norm(), a.dot(b));
    }
  }
  pseudo_source.resize(mesh.vertex_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    pseudo_source[v] = topo.is_boundary_vertex(static_cast<VertexId>(v)) || angle[v] >= 2.0 * kPi - 1e-6;
  }
  const double diag = mesh.bbox_diagonal();
  scale = diag > 0.0 ? diag : 1.0;
}

VertexId SurfaceContext::opposite_vertex(TriangleId t, EdgeId e) const {
  const Edge& E = topo.edge(e);
  for (VertexId v : mesh.triangle(t)) {
    if (v != E.v0 && v != E.v1) return v;
  }
  return kInvalidIndex;
}

EdgeId SurfaceContext::triangle_edge(TriangleId t, VertexId a, VertexId b) const {
  const VertexId lo = std::min(a, b), hi = std::max(a, b);
  for (EdgeId e : topo.triangle_edges(t)) {
    const Edge& E = topo.edge(e);
    if (E.v0 == lo && E.v1 == hi) return e;
  }
  return kInvalidIndex;
}

namespace {

Vec3 barycentric_of(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 v0 = b - a, v1 = c - a, v2 = q - a;
  const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  const double d20 = v2.dot(v0), d21 = v2.dot(v1);
  const double den = d00 * d11 - d01 * d01;
  if (den <= 0.0) return {1.0, 0.0, 0.0};
  const double v = (d11 * d20 - d01 * d21) / den;
  const double w = (d00 * d21 - d01 * d20) / den;
  return {1.0 - v - w, v, w};
}

// Evaluates a field solved on a mesh with one extra source vertex, in terms of
// the original mesh's edges and triangles.
class SplitEvaluator final : public FieldEvaluator {
 public:
  SplitEvaluator(std::shared_ptr<const SurfaceContext> aug, std::shared_ptr<const FieldEvaluator> inner,
                 VertexId s, VertexId ea, VertexId eb, double ts,
                 std::map<TriangleId, std::vector<TriangleId>> split)
      : aug_(std::move(aug)),
        inner_(std::move(inner)),
        s_(s),
        ea_(ea),
        eb_(eb),
        ts_(ts),
        split_(std::move(split)) {}

  double at_edge(VertexId a, VertexId b, double t) const override {
    if (ea_ != kInvalidIndex && ((a == ea_ && b == eb_) || (a == eb_ && b == ea_))) {
      const double tp = a == ea_ ? t : 1.0 - t;
      if (tp <= ts_) return inner_->at_edge(ea_, s_, ts_ > 0.0 ? tp / ts_ : 0.0);
      return inner_->at_edge(s_, eb_, (tp - ts_) / (1.0 - ts_));
    }
    return inner_->at_edge(a, b, t);
  }

  double at(const SurfacePoint& p) const override {
    const auto it = split_.find(p.triangle);
    if (it == split_.end()) return inner_->at(p);
    const Triangle& orig = original_triangle(p.triangle);
    const Vec3 q = p.barycentric[0] * aug_->mesh.position(orig[0]) +
                   p.barycentric[1] * aug_->mesh.position(orig[1]) +
                   p.barycentric[2] * aug_->mesh.position(orig[2]);
    SurfacePoint best;
    double best_min = -kInfinity;
    for (TriangleId t : it->second) {
      const Triangle& tri = aug_->mesh.triangle(t);
      const Vec3 w = barycentric_of(q, aug_->mesh.position(tri[0]), aug_->mesh.position(tri[1]),
                                    aug_->mesh.position(tri[2]));
      if (w.minCoeff() > best_min) {
        best_min = w.minCoeff();
        best = {t, w.cwiseMax(0.0) / w.cwiseMax(0.0).sum()};
      }
    }
    return inner_->at(best);
  }

  void set_originals(std::map<TriangleId, Triangle> orig) { originals_ = std::move(orig); }

 private:
  const Triangle& original_triangle(TriangleId t) const { return originals_.at(t); }

  std::shared_ptr<const SurfaceContext> aug_;
  std::shared_ptr<const FieldEvaluator> inner_;
  VertexId s_, ea_, eb_;
  double ts_;
  std::map<TriangleId, std::vector<TriangleId>> split_;
  std::map<TriangleId, Triangle> originals_;
};

GeodesicField solve_on(const std::shared_ptr<const SurfaceContext>& ctx, VertexId source,
                       const GeodesicOptions& opts) {
  if (source >= ctx->mesh.vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "source vertex out of range");
  }
  if (opts.method == GeodesicMethod::Exact) {
    ExactResult r = run_exact(*ctx, source, opts.max_distance);
    std::vector<double> d = r.vertex_dist;
    return FieldAccess::make(source, opts.method, std::move(d), make_exact_evaluator(ctx, std::move(r)));
  }
  DijkstraResult r = run_refined_dijkstra(*ctx, source, opts.refinement);
  if (opts.max_distance < kInfinity) {
    for (double& x : r.vertex_dist) {
      if (x > opts.max_distance) x = kInfinity;
    }
  }
  std::vector<double> d = r.vertex_dist;
  return FieldAccess::make(source, opts.method, std::move(d), make_dijkstra_evaluator(ctx, std::move(r)));
}

}  // namespace
}  // namespace detail

double GeodesicField::at(const SurfacePoint& p) const {
  if (!evaluator_) throw Error(ErrorCode::InvalidArgument, "field has no point evaluator");
  return evaluator_->at(p);
}

double GeodesicField::at_edge(VertexId a, VertexId b, double t) const {
  if (!evaluator_) throw Error(ErrorCode::InvalidArgument, "field has no point evaluator");
  return evaluator_->at_edge(a, b, t);
}

GeodesicSolver::GeodesicSolver(const TriMesh& mesh)
    : ctx_(std::make_shared<const detail::SurfaceContext>(mesh)) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no vertices");
}

const TriMesh& GeodesicSolver::mesh() const { return ctx_->mesh; }
const MeshTopology& GeodesicSolver::topology() const { return ctx_->topo; }

GeodesicField GeodesicSolver::solve_from(VertexId source, const GeodesicOptions& opts) const {
  return detail::solve_on(ctx_, source, opts);
}

GeodesicField GeodesicSolver::oracle_refined_dijkstra(VertexId source, int refinement) const {
  GeodesicOptions opts;
  opts.method = GeodesicMethod::RefinedDijkstra;
  opts.refinement = refinement;
  return detail::solve_on(ctx_, source, opts);
}

GeodesicField GeodesicSolver::solve_from_point(const SurfacePoint& point,
                                               const GeodesicOptions& opts) const {
  const TriMesh& mesh = ctx_->mesh;
  if (point.triangle >= mesh.triangle_count()) {
    throw Error(ErrorCode::InvalidArgument, "source triangle out of range");
  }
  Vec3 w = point.barycentric;
  if (!w.allFinite() || w.minCoeff() < -1e-9 || w.sum() <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "invalid barycentric coordinates");
  }
  w = w.cwiseMax(0.0);
  w /= w.sum();
  const double zero = 1e-9;
  const Triangle& tri = mesh.triangle(point.triangle);
  int nonzero = 0;
  for (int k = 0; k < 3; ++k) nonzero += w[k] > zero;
  if (nonzero <= 1) {
    int k = 0;
    w.maxCoeff(&k);
    return solve_from(tri[k], opts);
  }

  const auto n = static_cast<VertexId>(mesh.vertex_count());
  std::vector<Vec3> positions = mesh.positions();
  std::vector<Triangle> triangles = mesh.triangles();
  const Vec3 q = mesh.point({point.triangle, w});
  positions.push_back(q);
  const VertexId s = n;
  std::map<TriangleId, std::vector<TriangleId>> split;
  std::map<TriangleId, Triangle> originals;
  VertexId ea = kInvalidIndex, eb = kInvalidIndex;
  double ts = 0.0;

  if (nonzero == 3) {
    const TriangleId t = point.triangle;
    originals[t] = tri;
    const auto t1 = static_cast<TriangleId>(triangles.size());
    triangles[t] = {tri[0], tri[1], s};
    triangles.push_back({tri[1], tri[2], s});
    triangles.push_back({tri[2], tri[0], s});
    split[t] = {t, t1, t1 + 1};
  } else {
    int k = 0;
    while (w[k] > zero) ++k;
    ea = tri[(k + 1) % 3];
    eb = tri[(k + 2) % 3];
    ts = w[(k + 2) % 3] / (w[(k + 1) % 3] + w[(k + 2) % 3]);
    const EdgeId e = ctx_->topo.find_edge(ea, eb);
    for (TriangleId f : ctx_->topo.edge(e).faces) {
      if (f == kInvalidIndex) continue;
      const Triangle ft = mesh.triangle(f);
      originals[f] = ft;
      int i = 0;
      while (!((ft[i] == ea && ft[(i + 1) % 3] == eb) || (ft[i] == eb && ft[(i + 1) % 3] == ea))) ++i;
      const VertexId x = ft[i], y = ft[(i + 1) % 3], z = ft[(i + 2) % 3];
      const auto f1 = static_cast<TriangleId>(triangles.size());
      triangles[f] = {x, s, z};
      triangles.push_back({s, y, z});
      split[f] = {f, f1};
    }
  }

  auto aug = std::make_shared<const detail::SurfaceContext>(TriMesh(std::move(positions), std::move(triangles)));
  GeodesicField inner = detail::solve_on(aug, s, opts);
  std::vector<double> d(inner.distances().begin(), inner.distances().begin() + n);
  auto eval = std::make_shared<detail::SplitEvaluator>(aug, detail::FieldAccess::evaluator_ptr(inner), s, ea,
                                                       eb, ts, std::move(split));
  eval->set_originals(std::move(originals));
  return detail::FieldAccess::make(kInvalidIndex, opts.method, std::move(d), std::move(eval));
}

GeodesicField solve_from(const TriMesh& mesh, VertexId source, const GeodesicOptions& opts) {
  return GeodesicSolver(mesh).solve_from(source, opts);
}

GeodesicField solve_from_point(const TriMesh& mesh, const SurfacePoint& point, const GeodesicOptions& opts) {
  return GeodesicSolver(mesh).solve_from_point(point, opts);
}

GeodesicField oracle_refined_dijkstra(const TriMesh& mesh, VertexId source, int refinement) {
  return GeodesicSolver(mesh).oracle_refined_dijkstra(source, refinement);
}

}  // namespace fatpad
