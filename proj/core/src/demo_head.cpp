#include "fatpad/demo_head.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fatpad/fatpad_map.hpp"
#include "fatpad/primitives.hpp"
#include "fatpad/topology.hpp"

namespace fatpad {
namespace {

// Polar warp about +z pulling samples towards the face: theta -> theta - a sin(theta).
constexpr double kWarp = 0.7;
const Vec3 kAxes(0.78, 1.0, 0.88);

Vec3 warp(const Vec3& u) {
  const double theta = std::acos(std::clamp(u.z(), -1.0, 1.0));
  const double s = std::sin(theta);
  if (s < 1e-12) return u;
  const double t = theta - kWarp * s;
  const double k = std::sin(t) / s;
  return Vec3(u.x() * k, u.y() * k, std::cos(t));
}

struct Bump {
  double x, y, sx, sy, amplitude;
};

// Relief in face coordinates (x, y of the unit direction).
const Bump kBumps[] = {
    {0.0, -0.04, 0.07, 0.16, 0.16},   // nose
    {0.0, 0.30, 0.30, 0.05, 0.035},   // brow ridge
    {-0.36, -0.12, 0.14, 0.12, 0.04}, // cheeks
    {0.36, -0.12, 0.14, 0.12, 0.04},
    {0.0, -0.33, 0.13, 0.035, 0.03},  // upper lip
    {0.0, -0.46, 0.12, 0.035, 0.03},  // lower lip
    {0.0, -0.70, 0.14, 0.10, 0.05},   // chin
};

double smoothstep(double a, double b, double x) {
  const double t = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

Vec3 head_point(const Vec3& w) {
  double relief = 0.0;
  for (const Bump& b : kBumps) {
    const double dx = (w.x() - b.x) / b.sx, dy = (w.y() - b.y) / b.sy;
    relief += b.amplitude * std::exp(-0.5 * (dx * dx + dy * dy));
  }
  relief *= smoothstep(0.2, 0.5, w.z());
  return kAxes.cwiseProduct(w) * (1.0 + relief);
}

struct PadDef {
  const char* id;
  const char* region;
  double x, y, radius;
  const char* mask;   // axis mask of the handle, empty for none
  int movable;        // +1: border above the anchor row is movable, -1: below, 0: none
};

const PadDef kPads[] = {
    {"forehead", "upper", 0.0, 0.55, 0.20, "", 0},
    {"brow_outer_l", "upper", -0.30, 0.32, 0.13, "", 0},
    {"brow_outer_r", "upper", 0.30, 0.32, 0.13, "", 0},
    {"brow_inner_l", "upper", -0.10, 0.30, 0.09, "", 0},
    {"brow_inner_r", "upper", 0.10, 0.30, 0.09, "", 0},
    {"cheek_l", "upper", -0.40, -0.10, 0.17, "", 0},
    {"cheek_r", "upper", 0.40, -0.10, 0.17, "", 0},
    {"nose", "upper", 0.0, -0.04, 0.12, "z", 0},
    {"upper_lip", "upper", 0.0, -0.32, 0.075, "", -1},
    {"lip_corner_l", "upper", -0.17, -0.39, 0.08, "", 0},
    {"lip_corner_r", "upper", 0.17, -0.39, 0.08, "", 0},
    {"lower_lip", "lower", 0.0, -0.47, 0.075, "", 1},
    {"chin", "lower", 0.0, -0.70, 0.14, "", 0},
    {"jaw_l", "lower", -0.40, -0.52, 0.14, "", 0},
    {"jaw_r", "lower", 0.40, -0.52, 0.14, "", 0},
};

}  // namespace

TriMesh make_demo_head() {
  const TriMesh sphere = make_icosphere(5, 1.0, Vec3::Zero());
  std::vector<Vec3> p;
  p.reserve(sphere.vertex_count());
  for (const Vec3& u : sphere.positions()) p.push_back(head_point(warp(u)));
  return TriMesh(std::move(p), sphere.triangles());
}

std::string make_demo_map(const TriMesh& head) {
  // Face coordinates are recovered from positions by undoing the ellipsoid
  // scaling; the relief is radial so directions are preserved.
  std::vector<Vec3> dir(head.vertex_count());
  for (VertexId v = 0; v < head.vertex_count(); ++v) dir[v] = head.position(v).cwiseQuotient(kAxes).normalized();
  const MeshTopology topo(head);

  nlohmann::json pads = nlohmann::json::array();
  for (const PadDef& d : kPads) {
    std::vector<VertexId> vs;
    VertexId anchor = 0;
    double best = kInfinity;
    for (VertexId v = 0; v < head.vertex_count(); ++v) {
      if (dir[v].z() <= 0.0) continue;
      const double r = std::hypot(dir[v].x() - d.x, dir[v].y() - d.y);
      if (r < d.radius) vs.push_back(v);
      if (r < best) {
        best = r;
        anchor = v;
      }
    }
    vs = regularize_pad(head, vs);
    std::vector<VertexId> movable;
    if (d.movable != 0) {
      for (VertexId v : compute_pad_border(vs, topo)) {
        const double dy = dir[v].y() - d.y;
        if (d.movable * dy > 0.5 * d.radius) movable.push_back(v);
      }
    }
    nlohmann::json handle = {{"id", d.id}, {"anchor", anchor}};
    if (*d.mask != '\0') handle["axis_mask"] = d.mask;
    pads.push_back({{"id", d.id},
                    {"region", d.region},
                    {"vertices", vs},
                    {"movable_border", movable},
                    {"handles", nlohmann::json::array({handle})}});
  }
  const nlohmann::json doc = {{"fingerprint",
                               {{"topology", topology_fingerprint(head)},
                                {"vertex_count", head.vertex_count()},
                                {"triangle_count", head.triangle_count()}}},
                              {"pads", pads}};
  return doc.dump(1);
}

}  // namespace fatpad
