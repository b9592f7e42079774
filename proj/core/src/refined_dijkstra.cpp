#include <algorithm>
#include <queue>

#include "geodesic_internal.hpp"

namespace fatpad::detail {
namespace {

class RefinedGraph {
 public:
  RefinedGraph(const SurfaceContext& ctx, int k)
      : ctx_(ctx), k_(static_cast<std::uint32_t>(k)), n_(static_cast<std::uint32_t>(ctx.mesh.vertex_count())) {}

  std::uint32_t node_count() const {
    return n_ + static_cast<std::uint32_t>(ctx_.topo.edges().size()) * k_;
  }

  Vec3 position(std::uint32_t node) const {
    if (node < n_) return ctx_.mesh.position(node);
    const std::uint32_t e = (node - n_) / k_;
    const std::uint32_t j = (node - n_) % k_;
    const double t = static_cast<double>(j + 1) / static_cast<double>(k_ + 1);
    const Edge& E = ctx_.topo.edge(e);
    return (1.0 - t) * ctx_.mesh.position(E.v0) + t * ctx_.mesh.position(E.v1);
  }

  template <class F>
  void for_face_nodes(TriangleId t, F&& f) const {
    for (VertexId v : ctx_.mesh.triangle(t)) f(v);
    for (EdgeId e : ctx_.topo.triangle_edges(t)) {
      for (std::uint32_t j = 0; j < k_; ++j) f(n_ + e * k_ + j);
    }
  }

  template <class F>
  void for_node_faces(std::uint32_t node, F&& f) const {
    if (node < n_) {
      for (TriangleId t : ctx_.topo.vertex_triangles(node)) f(t);
      return;
    }
    const Edge& E = ctx_.topo.edge((node - n_) / k_);
    for (TriangleId t : E.faces) {
      if (t != kInvalidIndex) f(t);
    }
  }

  std::uint32_t edge_node(EdgeId e, std::uint32_t j) const { return n_ + e * k_ + j; }

 private:
  const SurfaceContext& ctx_;
  std::uint32_t k_;
  std::uint32_t n_;
};

class DijkstraEvaluator final : public FieldEvaluator {
 public:
  DijkstraEvaluator(std::shared_ptr<const SurfaceContext> ctx, DijkstraResult r)
      : ctx_(std::move(ctx)), r_(std::move(r)) {}

  double at(const SurfacePoint& p) const override {
    const Vec3 q = ctx_->mesh.point(p);
    return min_over_face(p.triangle, q);
  }

  double at_edge(VertexId a, VertexId b, double t) const override {
    const EdgeId e = ctx_->topo.find_edge(a, b);
    if (e == kInvalidIndex) throw Error(ErrorCode::InvalidArgument, "vertices are not adjacent");
    const Vec3 q = (1.0 - t) * ctx_->mesh.position(a) + t * ctx_->mesh.position(b);
    double best = kInfinity;
    for (TriangleId f : ctx_->topo.edge(e).faces) {
      if (f != kInvalidIndex) best = std::min(best, min_over_face(f, q));
    }
    return best;
  }

  const DijkstraResult& data() const { return r_; }

 private:
  double node_dist(std::uint32_t node) const {
    const auto n = static_cast<std::uint32_t>(r_.vertex_dist.size());
    return node < n ? r_.vertex_dist[node] : r_.edge_node_dist[node - n];
  }

  double min_over_face(TriangleId t, const Vec3& q) const {
    RefinedGraph g(*ctx_, r_.refinement);
    double best = kInfinity;
    g.for_face_nodes(t, [&](std::uint32_t node) {
      best = std::min(best, node_dist(node) + (g.position(node) - q).norm());
    });
    return best;
  }

  std::shared_ptr<const SurfaceContext> ctx_;
  DijkstraResult r_;
};

}  // namespace

DijkstraResult run_refined_dijkstra(const SurfaceContext& ctx, VertexId source, int refinement) {
  if (refinement < 0) throw Error(ErrorCode::InvalidArgument, "refinement must be non-negative");
  const RefinedGraph g(ctx, refinement);
  std::vector<double> dist(g.node_count(), kInfinity);
  std::vector<bool> done(g.node_count(), false);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = true;
    const Vec3 pu = g.position(u);
    g.for_node_faces(u, [&](TriangleId t) {
      g.for_face_nodes(t, [&](std::uint32_t v) {
        if (done[v]) return;
        const double nd = du + (g.position(v) - pu).norm();
        if (nd < dist[v]) {
          dist[v] = nd;
          queue.emplace(nd, v);
        }
      });
    });
  }
  DijkstraResult r;
  r.refinement = refinement;
  const std::size_t n = ctx.mesh.vertex_count();
  r.vertex_dist.assign(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(n));
  r.edge_node_dist.assign(dist.begin() + static_cast<std::ptrdiff_t>(n), dist.end());
  return r;
}

std::shared_ptr<const FieldEvaluator> make_dijkstra_evaluator(std::shared_ptr<const SurfaceContext> ctx,
                                                              DijkstraResult result) {
  return std::make_shared<DijkstraEvaluator>(std::move(ctx), std::move(result));
}

const DijkstraResult* dijkstra_data(const FieldEvaluator& eval) {
  const auto* d = dynamic_cast<const DijkstraEvaluator*>(&eval);
  return d ? &d->data() : nullptr;
}

}  // namespace fatpad::detail
