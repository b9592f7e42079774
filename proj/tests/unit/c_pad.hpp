#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "fatpad/geodesic.hpp"
#include "fatpad/fatpad_map.hpp"
#include "fatpad/primitives.hpp"

namespace fixtures {

using namespace fatpad;

// A C-shaped flat pad: annulus sector around (2,2) open towards +x.
struct CScene {
  TriMesh mesh = make_grid(28, 28, 4.0, 4.0);
  std::vector<VertexId> pad;
  VertexId anchor = 0;

  CScene() {
    double best = kInfinity;
    for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
      const Vec3 d = mesh.position(v) - Vec3(2, 2, 0);
      const double r = std::hypot(d.x(), d.y());
      const double theta = std::atan2(d.y(), d.x());
      if (r >= 0.5 && r <= 1.5 && std::abs(theta) > kPi / 4) pad.push_back(v);
      const double dh = (mesh.position(v) - Vec3(1.0, 2.0, 0)).norm();
      if (dh < best) {
        best = dh;
        anchor = v;
      }
    }
    pad = regularize_pad(mesh, pad);
  }
};

// The three selection rules applied literally over every pad-boundary edge.
inline std::optional<Vec3> brute_force_intersection(const TriMesh& mesh, const std::vector<VertexId>& pad_sorted,
                                             VertexId anchor, VertexId v, const GeodesicSolver& solver,
                                             const GeodesicField& hf) {
  auto in_pad = [&](VertexId x) { return std::binary_search(pad_sorted.begin(), pad_sorted.end(), x); };
  std::map<std::pair<VertexId, VertexId>, int> count;
  for (const Triangle& t : mesh.triangles()) {
    if (!in_pad(t[0]) || !in_pad(t[1]) || !in_pad(t[2])) continue;
    for (int k = 0; k < 3; ++k) ++count[std::minmax(t[k], t[(k + 1) % 3])];
  }
  const Vec3 H = mesh.position(anchor), V = mesh.position(v), N = mesh.normal(anchor);
  const Vec3 n = (V - H).cross(N);
  struct Cand {
    VertexId a, b;
    double t;
    Vec3 x;
  };
  std::vector<Cand> cands;
  for (const auto& [e, c] : count) {
    if (c != 1) continue;
    const Vec3 A = mesh.position(e.first), B = mesh.position(e.second);
    const double sa = n.dot(A - H), sb = n.dot(B - H);
    std::vector<double> ts;
    if (sa == 0.0) ts.push_back(0.0);
    if (sb == 0.0) ts.push_back(1.0);
    if (sa * sb < 0.0) ts.push_back(sa / (sa - sb));
    for (double t : ts) cands.push_back({e.first, e.second, t, A + t * (B - A)});
  }
  const GeodesicField vf = solver.solve_from(v);
  std::optional<Vec3> best;
  double best_d = kInfinity;
  for (const Cand& c : cands) {
    const Vec3 hi = c.x - H, hv = V - H;
    if (hi.dot(hv) / (hi.norm() * hv.norm()) <= 1.0 - 1e-4) continue;  // A: same direction
    if (!(hf[v] < hf.at_edge(c.a, c.b, c.t))) continue;                 // B/C: v between h and i
    const double d = vf.at_edge(c.a, c.b, c.t);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = c.x;
    }
  }
  return best;
}

}  // namespace fixtures
