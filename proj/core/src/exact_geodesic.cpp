// Exact polyhedral geodesic distance by continuous-Dijkstra window
// propagation. Each window is an interval of an edge whose points are reached
// by straight lines, in the unfolded plane, from one (pseudo-)source image.
// Per edge the stored windows are kept disjoint and hold the pointwise minimum.

#include <algorithm>
#include <cmath>
#include <queue>

#include "geodesic_internal.hpp"

namespace fatpad::detail {
namespace {

struct Win {
  EdgeId edge = 0;
  TriangleId towards = kInvalidIndex;
  double b0 = 0.0, b1 = 0.0;
  double sx = 0.0, sy = 0.0;
  double d = 0.0;
  std::uint32_t version = 0;
  bool alive = true;
  bool propagated = false;

  double eval(double x) const { return d + std::hypot(x - sx, sy); }
  double min_dist() const { return eval(std::clamp(sx, b0, b1)); }
};

struct Event {
  double key;
  std::uint8_t kind;  // 0 vertex, 1 window
  std::uint32_t id;
  std::uint32_t version;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.key != b.key) return a.key > b.key;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.id > b.id;
  }
};

// Abscissae in the common domain where d1 + |x - s1| = d2 + |x - s2|. Squaring
// twice can add spurious roots; callers only use them as candidate breakpoints.
void crossings(const Win& w, const Win& o, double lo, double hi, std::vector<double>& out) {
  const double a1 = w.sx, h1 = w.sy, a2 = o.sx, h2 = o.sy;
  const double D = o.d - w.d;
  const double alpha = 2.0 * (a2 - a1);
  const double beta = a1 * a1 - a2 * a2 + h1 * h1 - h2 * h2;
  const double gamma = beta - D * D;
  const double A = alpha * alpha - 4.0 * D * D;
  const double B = 2.0 * alpha * gamma + 8.0 * D * D * a2;
  const double C = gamma * gamma - 4.0 * D * D * (a2 * a2 + h2 * h2);
  auto push = [&](double x) {
    if (std::isfinite(x) && x > lo && x < hi) out.push_back(x);
  };
  const double scale = alpha * alpha + 4.0 * D * D;
  if (std::abs(A) <= 1e-12 * scale) {
    if (B != 0.0) push(-C / B);
    return;
  }
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) {
    // Tangency lost to rounding still marks a useful split point.
    if (disc > -1e-12 * B * B) push(-B / (2.0 * A));
    return;
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (B + std::copysign(sq, B));
  if (q != 0.0) {
    push(q / A);
    push(C / q);
  } else {
    push(0.0);
  }
}

class Propagator {
 public:
  Propagator(const SurfaceContext& ctx, double max_distance)
      : ctx_(ctx),
        edge_wins_(ctx.topo.edges().size()),
        dist_(ctx.mesh.vertex_count(), kInfinity),
        emitted_(ctx.mesh.vertex_count(), kInfinity),
        tol_(1e-11 * ctx.scale),
        max_distance_(max_distance) {}

  ExactResult run(VertexId source) {
    dist_[source] = 0.0;
    queue_.push({0.0, 0, source, 0});
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      if (ev.kind == 0) {
        process_vertex(ev.id);
      } else {
        const Win& w = wins_[ev.id];
        if (w.alive && !w.propagated && w.version == ev.version) propagate(ev.id);
      }
    }
    ExactResult r;
    r.vertex_dist = std::move(dist_);
    r.edge_offset.assign(edge_wins_.size() + 1, 0);
    for (std::size_t e = 0; e < edge_wins_.size(); ++e) {
      r.edge_offset[e] = static_cast<std::uint32_t>(r.windows.size());
      for (std::uint32_t id : edge_wins_[e]) {
        const Win& w = wins_[id];
        r.windows.push_back({w.edge, w.towards, w.b0, w.b1, w.sx, w.sy, w.d});
      }
    }
    r.edge_offset.back() = static_cast<std::uint32_t>(r.windows.size());
    return r;
  }

 private:
  void update_vertex(VertexId v, double value) {
    if (!(value < dist_[v])) return;
    dist_[v] = value;
    if (ctx_.pseudo_source[v] && value < emitted_[v] - tol_ && value <= max_distance_) {
      queue_.push({value, 0, v, 0});
    }
  }

  void schedule(std::uint32_t id) {
    const Win& w = wins_[id];
    const double key = w.min_dist();
    if (key <= max_distance_) queue_.push({key, 1, id, w.version});
  }

  void process_vertex(VertexId v) {
    const double D = dist_[v];
    if (!(D < emitted_[v] - tol_)) return;
    emitted_[v] = D;
    const auto& topo = ctx_.topo;
    for (TriangleId t : topo.vertex_triangles(v)) {
      const Triangle& tri = ctx_.mesh.triangle(t);
      int k = 0;
      while (tri[k] != v) ++k;
      const EdgeId e = topo.triangle_edges(t)[(k + 1) % 3];
      const Edge& E = topo.edge(e);
      const double L = ctx_.edge_length[e];
      const double la = ctx_.edge_length[ctx_.triangle_edge(t, v, E.v0)];
      const double lb = ctx_.edge_length[ctx_.triangle_edge(t, v, E.v1)];
      Win w;
      w.edge = e;
      w.towards = E.other_face(t);
      w.b0 = 0.0;
      w.b1 = L;
      w.sx = (L * L + la * la - lb * lb) / (2.0 * L);
      w.sy = std::sqrt(std::max(0.0, la * la - w.sx * w.sx));
      w.d = D;
      insert(w);
    }
    for (EdgeId e : topo.vertex_edges(v)) {
      const Edge& E = topo.edge(e);
      const double L = ctx_.edge_length[e];
      Win w;
      w.edge = e;
      w.towards = kInvalidIndex;
      w.b0 = 0.0;
      w.b1 = L;
      w.sx = E.v0 == v ? 0.0 : L;
      w.sy = 0.0;
      w.d = D;
      insert(w);
    }
  }

  void propagate(std::uint32_t id) {
    wins_[id].propagated = true;
    const Win w = wins_[id];
    if (w.towards == kInvalidIndex) return;
    const double L = ctx_.edge_length[w.edge];
    if (w.sy <= 1e-12 * L) return;
    const TriangleId T = w.towards;
    const Edge& E = ctx_.topo.edge(w.edge);
    const VertexId p = ctx_.opposite_vertex(T, w.edge);
    const EdgeId e0 = ctx_.triangle_edge(T, E.v0, p);
    const EdgeId e1 = ctx_.triangle_edge(T, E.v1, p);
    const double l0 = ctx_.edge_length[e0];
    const double l1 = ctx_.edge_length[e1];
    const double px = (L * L + l0 * l0 - l1 * l1) / (2.0 * L);
    const double py = -std::sqrt(std::max(0.0, l0 * l0 - px * px));
    if (py > -1e-12 * L) return;

    auto planar = [&](VertexId v) -> Vec2 {
      if (v == E.v0) return {0.0, 0.0};
      if (v == E.v1) return {L, 0.0};
      return {px, py};
    };
    for (EdgeId et : {e0, e1}) {
      const Edge& Et = ctx_.topo.edge(et);
      const Vec2 P0 = planar(Et.v0);
      const Vec2 P1 = planar(Et.v1);
      const Vec2 Dv = P1 - P0;
      auto project = [&](const Vec2& q) { return w.sx + (q.x() - w.sx) * w.sy / (w.sy - q.y()); };
      auto mu_at = [&](double b) {
        const double a0 = (P0.x() - w.sx) * w.sy - (b - w.sx) * (w.sy - P0.y());
        const double a1 = Dv.x() * w.sy + (b - w.sx) * Dv.y();
        return a1 == 0.0 ? (a0 <= 0.0 ? 0.0 : 1.0) : -a0 / a1;
      };
      const double X0 = project(P0);
      const double X1 = project(P1);
      // The inverse of the projective map has a spurious root past its pole,
      // so disjoint ranges must be rejected before solving for mu.
      if (std::max(X0, X1) < w.b0 || std::min(X0, X1) > w.b1) continue;
      double lo, hi;
      if (X1 >= X0) {
        lo = X0 >= w.b0 ? 0.0 : mu_at(w.b0);
        hi = X1 <= w.b1 ? 1.0 : mu_at(w.b1);
      } else {
        lo = X0 <= w.b1 ? 0.0 : mu_at(w.b1);
        hi = X1 >= w.b0 ? 1.0 : mu_at(w.b0);
      }
      lo = std::clamp(lo, 0.0, 1.0);
      hi = std::clamp(hi, 0.0, 1.0);
      if (!(hi - lo > 1e-12)) continue;
      const double Lt = ctx_.edge_length[et];
      const Vec2 u = Dv / Lt;
      const Vec2 rel = Vec2(w.sx, w.sy) - P0;
      Win n;
      n.edge = et;
      n.towards = Et.other_face(T);
      n.b0 = lo * Lt;
      n.b1 = hi * Lt;
      n.sx = rel.dot(u);
      n.sy = std::abs(u.x() * rel.y() - u.y() * rel.x());
      n.d = w.d;
      insert(n);
    }
  }

  void insert(Win w) {
    const double L = ctx_.edge_length[w.edge];
    const double eps = 1e-10 * L;
    const Edge& E = ctx_.topo.edge(w.edge);
    w.b0 = std::max(0.0, w.b0);
    w.b1 = std::min(L, w.b1);
    if (w.b1 < w.b0) return;
    // Every window is a genuine path, so its endpoint values bound the vertex
    // distances from above even when the window itself loses.
    if (w.b0 <= eps) update_vertex(E.v0, w.eval(0.0));
    if (w.b1 >= L - eps) update_vertex(E.v1, w.eval(L));
    if (w.b1 - w.b0 < eps) return;

    auto& list = edge_wins_[w.edge];
    over_.clear();
    for (std::uint32_t id : list) {
      const Win& o = wins_[id];
      if (o.b1 > w.b0 && o.b0 < w.b1) over_.push_back(id);
    }
    bps_.assign({w.b0, w.b1});
    for (std::uint32_t id : over_) {
      const Win& o = wins_[id];
      if (o.b0 > w.b0 && o.b0 < w.b1) bps_.push_back(o.b0);
      if (o.b1 > w.b0 && o.b1 < w.b1) bps_.push_back(o.b1);
      crossings(w, o, std::max(w.b0, o.b0), std::min(w.b1, o.b1), bps_);
    }
    std::sort(bps_.begin(), bps_.end());

    won_.clear();
    for (std::size_t i = 0; i + 1 < bps_.size(); ++i) {
      const double x0 = bps_[i], x1 = bps_[i + 1];
      if (x1 - x0 <= 1e-14 * L) continue;
      const double xm = 0.5 * (x0 + x1);
      double other = kInfinity;
      for (std::uint32_t id : over_) {
        const Win& o = wins_[id];
        if (o.b0 <= xm && xm <= o.b1) other = std::min(other, o.eval(xm));
      }
      if (w.eval(xm) < other - tol_) {
        if (!won_.empty() && x0 - won_.back().second <= 1e-14 * L) {
          won_.back().second = x1;
        } else {
          won_.emplace_back(x0, x1);
        }
      }
    }
    if (won_.empty()) return;

    bool changed = false;
    for (std::uint32_t id : over_) {
      rest_.clear();
      double cur = wins_[id].b0;
      const double end = wins_[id].b1;
      for (const auto& [l, r] : won_) {
        if (r <= cur || l >= end) continue;
        if (l > cur) rest_.emplace_back(cur, l);
        cur = std::max(cur, r);
      }
      if (cur < end) rest_.emplace_back(cur, end);
      std::erase_if(rest_, [&](const auto& iv) { return iv.second - iv.first < eps; });
      if (rest_.empty()) {
        wins_[id].alive = false;
        changed = true;
        continue;
      }
      for (std::size_t k = 0; k < rest_.size(); ++k) {
        if (k == 0) {
          Win& o = wins_[id];
          if (o.b0 == rest_[0].first && o.b1 == rest_[0].second) continue;
          o.b0 = rest_[0].first;
          o.b1 = rest_[0].second;
          ++o.version;
          if (!o.propagated) schedule(id);
        } else {
          Win piece = wins_[id];
          piece.b0 = rest_[k].first;
          piece.b1 = rest_[k].second;
          piece.version = 0;
          const auto nid = static_cast<std::uint32_t>(wins_.size());
          wins_.push_back(piece);
          list.push_back(nid);
          if (!piece.propagated) schedule(nid);
        }
      }
    }
    for (const auto& [l, r] : won_) {
      if (r - l < eps) continue;
      Win n = w;
      n.b0 = l;
      n.b1 = r;
      const auto nid = static_cast<std::uint32_t>(wins_.size());
      wins_.push_back(n);
      list.push_back(nid);
      schedule(nid);
    }
    if (changed) std::erase_if(list, [&](std::uint32_t id) { return !wins_[id].alive; });
    std::sort(list.begin(), list.end(),
              [&](std::uint32_t a, std::uint32_t b) { return wins_[a].b0 < wins_[b].b0; });
  }

  const SurfaceContext& ctx_;
  std::vector<Win> wins_;
  std::vector<std::vector<std::uint32_t>> edge_wins_;
  std::vector<double> dist_;
  std::vector<double> emitted_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  double tol_;
  double max_distance_;

  std::vector<std::uint32_t> over_;
  std::vector<double> bps_;
  std::vector<std::pair<double, double>> won_;
  std::vector<std::pair<double, double>> rest_;
};

class ExactEvaluator final : public FieldEvaluator {
 public:
  ExactEvaluator(std::shared_ptr<const SurfaceContext> ctx, ExactResult r)
      : ctx_(std::move(ctx)), r_(std::move(r)) {}

  double at_edge(VertexId a, VertexId b, double t) const override {
    const EdgeId e = ctx_->topo.find_edge(a, b);
    if (e == kInvalidIndex) throw Error(ErrorCode::InvalidArgument, "vertices are not adjacent");
    const Edge& E = ctx_->topo.edge(e);
    const double L = ctx_->edge_length[e];
    const double x = (a == E.v0 ? t : 1.0 - t) * L;
    return edge_value(e, x);
  }

  double at(const SurfacePoint& p) const override {
    const Triangle& tri = ctx_->mesh.triangle(p.triangle);
    const Vec3& w = p.barycentric;
    const double zero = 1e-12;
    int nonzero = 0;
    for (int k = 0; k < 3; ++k) nonzero += w[k] > zero;
    if (nonzero <= 1) {
      int k = 0;
      w.maxCoeff(&k);
      return r_.vertex_dist[tri[k]];
    }
    if (nonzero == 2) {
      for (int k = 0; k < 3; ++k) {
        if (w[k] > zero) continue;
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        return at_edge(tri[i], tri[j], w[j] / (w[i] + w[j]));
      }
    }
    const Vec3 q = ctx_->mesh.point(p);
    double best = kInfinity;
    for (int k = 0; k < 3; ++k) {
      best = std::min(best, r_.vertex_dist[tri[k]] + (ctx_->mesh.position(tri[k]) - q).norm());
    }
    for (EdgeId e : ctx_->topo.triangle_edges(p.triangle)) {
      const Edge& E = ctx_->topo.edge(e);
      const Vec3 o = ctx_->mesh.position(E.v0);
      const Vec3 axis = (ctx_->mesh.position(E.v1) - o).normalized();
      const Vec3 rel = q - o;
      const double qx = rel.dot(axis);
      const double qy = -(rel - qx * axis).norm();
      const double eps = 1e-9 * ctx_->edge_length[e];
      for (std::uint32_t k = r_.edge_offset[e]; k < r_.edge_offset[e + 1]; ++k) {
        const StoredWindow& sw = r_.windows[k];
        if (sw.towards != p.triangle || sw.sy <= 0.0) continue;
        const double X = sw.sx + (qx - sw.sx) * sw.sy / (sw.sy - qy);
        if (X < sw.b0 - eps || X > sw.b1 + eps) continue;
        best = std::min(best, sw.d + std::hypot(qx - sw.sx, qy - sw.sy));
      }
    }
    return best;
  }

  const ExactResult& data() const { return r_; }

 private:
  double edge_value(EdgeId e, double x) const {
    const Edge& E = ctx_->topo.edge(e);
    const double L = ctx_->edge_length[e];
    double best = std::min(r_.vertex_dist[E.v0] + x, r_.vertex_dist[E.v1] + (L - x));
    const double eps = 1e-9 * L;
    for (std::uint32_t k = r_.edge_offset[e]; k < r_.edge_offset[e + 1]; ++k) {
      const StoredWindow& sw = r_.windows[k];
      if (x >= sw.b0 - eps && x <= sw.b1 + eps) best = std::min(best, sw.eval(x));
    }
    return best;
  }

  std::shared_ptr<const SurfaceContext> ctx_;
  ExactResult r_;
};

}  // namespace

ExactResult run_exact(const SurfaceContext& ctx, VertexId source, double max_distance) {
  return Propagator(ctx, max_distance).run(source);
}

std::shared_ptr<const FieldEvaluator> make_exact_evaluator(std::shared_ptr<const SurfaceContext> ctx,
                                                           ExactResult result) {
  return std::make_shared<ExactEvaluator>(std::move(ctx), std::move(result));
}

const ExactResult* exact_data(const FieldEvaluator& eval) {
  const auto* e = dynamic_cast<const ExactEvaluator*>(&eval);
  return e ? &e->data() : nullptr;
}

}  // namespace fatpad::detail
