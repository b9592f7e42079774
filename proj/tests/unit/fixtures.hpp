#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatpad/fatpad_map.hpp"
#include "fatpad/primitives.hpp"

namespace fixtures {

using namespace fatpad;

struct PadSpec {
  std::string id;
  std::string region = "upper";
  std::vector<VertexId> vertices;
  std::vector<VertexId> movable;
  std::vector<std::pair<std::string, VertexId>> handles;
  std::string axis_mask;  // applied to every handle when non-empty
};

inline std::string map_json(const std::vector<PadSpec>& pads) {
  nlohmann::json jp = nlohmann::json::array();
  for (const PadSpec& p : pads) {
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& [id, anchor] : p.handles) {
      nlohmann::json h = {{"id", id}, {"anchor", anchor}};
      if (!p.axis_mask.empty()) h["axis_mask"] = p.axis_mask;
      hs.push_back(h);
    }
    jp.push_back({{"id", p.id},
                  {"region", p.region},
                  {"vertices", p.vertices},
                  {"movable_border", p.movable},
                  {"handles", hs}});
  }
  return nlohmann::json{{"pads", jp}}.dump();
}

/// Flat disc of radius 1.2 with 120 rings of 32 vertices; ring k sits at
/// radius k / 100. Vertex ids: 0 is the center, ring k segment s is
/// 1 + (k - 1) * 32 + s, and segment 0 lies on the +x axis.
struct DiscScene {
  static constexpr int kRings = 120;
  static constexpr int kSegments = 32;
  static constexpr int kPadRings = 100;
  TriMesh mesh = make_disc(kRings, kSegments, 1.2);

  static VertexId ring_vertex(int ring, int segment) {
    return ring == 0 ? 0 : static_cast<VertexId>(1 + (ring - 1) * kSegments + segment);
  }
  std::vector<VertexId> pad_vertices(int max_ring = kPadRings) const {
    std::vector<VertexId> out = {0};
    for (int r = 1; r <= max_ring; ++r) {
      for (int s = 0; s < kSegments; ++s) out.push_back(ring_vertex(r, s));
    }
    return out;
  }
  std::vector<VertexId> rim(int ring = kPadRings) const {
    std::vector<VertexId> out;
    for (int s = 0; s < kSegments; ++s) out.push_back(ring_vertex(ring, s));
    return out;
  }
};

/// Unit icosphere with circular pads around front-facing directions; a
/// stand-in for a head with upper and lower face regions.
struct SphereFace {
  TriMesh mesh = make_icosphere(4, 1.0, Vec3::Zero());
  std::vector<PadSpec> specs;
  FatPadMap map;

  static std::vector<Vec3> upper_directions() {
    return {{0, 0.6, 1}, {-0.5, 0.45, 1}, {0.5, 0.45, 1}, {-0.8, 0.1, 1},
            {0.8, 0.1, 1}, {0, 0.15, 1}, {-0.35, 0.05, 1}, {0.35, 0.05, 1}};
  }
  static std::vector<Vec3> lower_directions() {
    return {{0, -0.45, 1}, {-0.45, -0.35, 1}, {0.45, -0.35, 1}, {0, -0.85, 1}, {-0.6, -0.7, 1}, {0.6, -0.7, 1}};
  }

  explicit SphereFace(double radius = 0.15, bool lower_as_upper = false) {
    int n = 0;
    auto add = [&](const std::vector<Vec3>& dirs, const char* region) {
      for (Vec3 d : dirs) {
        d.normalize();
        std::vector<VertexId> vs;
        VertexId best = 0;
        for (VertexId v = 0; v < mesh.vertex_count(); ++v) {
          const Vec3 p = mesh.position(v).normalized();
          if (std::acos(std::clamp(p.dot(d), -1.0, 1.0)) < radius) vs.push_back(v);
          if (p.dot(d) > mesh.position(best).normalized().dot(d)) best = v;
        }
        const std::string id = "p" + std::to_string(n++);
        specs.push_back({id, region, regularize_pad(mesh, vs), {}, {{"h_" + id, best}}});
      }
    };
    add(upper_directions(), "upper");
    add(lower_directions(), lower_as_upper ? "upper" : "lower");
    map = load_map(map_json(specs), mesh);
  }
};

/// Open hemisphere-free bumpy height field used for random pads.
inline TriMesh bumpy_grid(int n, double amplitude) {
  const TriMesh g = make_grid(n, n, 2.0, 2.0);
  std::vector<Vec3> p = g.positions();
  for (Vec3& v : p) v.z() = amplitude * std::sin(3 * v.x()) * std::cos(2 * v.y());
  return TriMesh(p, g.triangles());
}

}  // namespace fixtures
