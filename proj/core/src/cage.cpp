#include "fatpad/cage.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fatpad/convex_hull.hpp"
#include "fatpad/error.hpp"
#include "fatpad/hash.hpp"
#include "fatpad/obj_io.hpp"
#include "fatpad/spatial.hpp"

namespace fatpad {

using nlohmann::json;

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

Vec3 offset_direction(const TriMesh& mesh, const Handle& h, const CageParams& params) {
  const Vec3 n = mesh.normal(h.anchor);
  const auto it = params.axis_masks.find(h.id);
  const Vec3 mask = it != params.axis_masks.end() ? it->second : h.axis_mask;
  Vec3 d = mask.cwiseProduct(n);
  if (d.norm() < 1e-12) d = n;
  return d.normalized();
}

std::vector<Vec3> offset_directions(const Cage& cage, const TriMesh& mesh, const FatPadMap& map,
                                    const CageParams& params) {
  std::vector<Vec3> dirs(cage.vertices.size(), Vec3::Zero());
  for (const auto& [id, v] : cage.handle_binding) dirs[v] = offset_direction(mesh, map.handle(id), params);
  return dirs;
}

Cage offset_cage(const Cage& cage, const std::vector<Vec3>& dirs, double offset) {
  Cage out = cage;
  for (std::size_t i = 0; i < out.vertices.size(); ++i) out.vertices[i] += offset * dirs[i];
  out.offset = offset;
  out.offset_directions = dirs;
  return out;
}

std::vector<VertexId> single_loop(const Cage& cage, const char* what) {
  const auto loops = boundary_loops(cage);
  if (loops.size() != 1) {
    throw Error(ErrorCode::InvalidTopology,
                fmt::format("{}: expected exactly one open boundary loop, found {}", what, loops.size()));
  }
  return loops.front();
}

}  // namespace

void CageParams::validate() const {
  if (!(alpha_base > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha_base must be positive");
  if (!(escalation > 1.0)) throw Error(ErrorCode::InvalidArgument, "escalation must exceed 1");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be at least 1");
  if (!(back_margin > 0.0)) throw Error(ErrorCode::InvalidArgument, "back_margin must be positive");
  if (!(apex_spread > 0.0)) throw Error(ErrorCode::InvalidArgument, "apex_spread must be positive");
  if (!(lateral_push >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lateral_push must be non-negative");
  if (!(view.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "view direction must be non-zero");
}

bool Cage::is_fixed(VertexId v) const { return std::binary_search(fixed.begin(), fixed.end(), v); }

std::optional<HandleId> Cage::handle_at(VertexId v) const {
  for (const auto& [id, bound] : handle_binding) {
    if (bound == v) return id;
  }
  return std::nullopt;
}

std::uint64_t Cage::hash() const {
  Fnv1a64 h;
  h.update(to_string(region));
  h.update_u64(vertices.size());
  for (const Vec3& p : vertices) {
    for (int k = 0; k < 3; ++k) h.update_f64(p[k]);
  }
  h.update_u64(triangles.size());
  for (const Triangle& t : triangles) {
    for (auto v : t) h.update_u64(v);
  }
  for (const auto& [id, v] : handle_binding) {
    h.update(id);
    h.update_u64(v);
  }
  for (auto v : fixed) h.update_u64(v);
  return h.digest();
}

std::vector<VertexId> region_vertices(const FatPadMap& map, Region region) {
  std::vector<VertexId> out;
  for (const FatPad& pad : map.pads()) {
    if (pad.region == region) out.insert(out.end(), pad.vertices.begin(), pad.vertices.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<TriangleId> region_triangles(const TriMesh& mesh, const FatPadMap& map, Region region) {
  std::vector<char> in(mesh.vertex_count(), 0);
  for (VertexId v : region_vertices(map, region)) in[v] = 1;
  std::vector<TriangleId> out;
  for (TriangleId t = 0; t < mesh.triangle_count(); ++t) {
    const Triangle& tri = mesh.triangle(t);
    if (in[tri[0]] && in[tri[1]] && in[tri[2]]) out.push_back(t);
  }
  return out;
}

Cage hull_cage(const TriMesh& mesh, const FatPadMap& map, Region region) {
  const auto handles = map.handles_in(region);
  if (handles.size() < 4) {
    throw Error(ErrorCode::DegenerateHull, fmt::format("{} region has {} handles, a cage needs at least 4",
                                                       to_string(region), handles.size()));
  }
  Cage cage;
  cage.region = region;
  for (const Handle* h : handles) {
    cage.handle_binding[h->id] = static_cast<VertexId>(cage.vertices.size());
    cage.vertices.push_back(mesh.position(h->anchor));
  }
  const ConvexHull hull = convex_hull(cage.vertices);
  if (!hull.excluded.empty()) {
    std::vector<std::string> ids;
    for (auto i : hull.excluded) ids.push_back(handles[i]->id);
    throw Error(ErrorCode::ConstructionFailure,
                fmt::format("handles not on the hull of the {} anchors: {}", to_string(region), join_ids(ids)));
  }
  cage.triangles = hull.faces;
  return cage;
}

Cage front_shell(const Cage& hull, const Vec3& view) {
  const Vec3 dir = view.normalized();
  std::vector<Triangle> kept;
  std::vector<VertexId> remap(hull.vertices.size(), kInvalidIndex);
  for (const Triangle& t : hull.triangles) {
    const Vec3& a = hull.vertices[t[0]];
    const Vec3 n = (hull.vertices[t[1]] - a).cross(hull.vertices[t[2]] - a);
    if (n.dot(dir) > 1e-9 * n.norm()) {
      kept.push_back(t);
      for (auto v : t) remap[v] = 0;
    }
  }
  if (kept.empty()) throw Error(ErrorCode::ConstructionFailure, "no hull face faces the viewer");
  Cage out;
  out.region = hull.region;
  for (VertexId v = 0; v < hull.vertices.size(); ++v) {
    if (remap[v] == kInvalidIndex) continue;
    remap[v] = static_cast<VertexId>(out.vertices.size());
    out.vertices.push_back(hull.vertices[v]);
  }
  std::vector<std::string> lost;
  for (const auto& [id, v] : hull.handle_binding) {
    if (remap[v] == kInvalidIndex) {
      lost.push_back(id);
    } else {
      out.handle_binding[id] = remap[v];
    }
  }
  if (!lost.empty()) {
    throw Error(ErrorCode::ConstructionFailure,
                "handles only on back-facing hull faces: " + join_ids(lost));
  }
  for (Triangle t : kept) {
    for (auto& v : t) v = remap[v];
    out.triangles.push_back(t);
  }
  for (auto v : hull.fixed) {
    if (remap[v] != kInvalidIndex) out.fixed.push_back(remap[v]);
  }
  std::sort(out.fixed.begin(), out.fixed.end());
  return out;
}

Cage scale_cage(const Cage& cage, const TriMesh& mesh, const FatPadMap& map, const CageParams& params) {
  params.validate();
  const auto dirs = offset_directions(cage, mesh, map, params);
  const auto subset = region_triangles(mesh, map, cage.region);
  double offset = params.alpha(cage.region) * mesh.bbox_diagonal();
  for (int k = 0; k < params.max_iterations; ++k, offset *= params.escalation) {
    Cage out = offset_cage(cage, dirs, offset);
    const std::size_t hits = count_intersections(out, mesh, subset);
    if (hits == 0) return out;
    spdlog::debug("scale_cage: offset {:.4g} leaves {} intersections", offset, hits);
  }
  throw Error(ErrorCode::ConstructionFailure,
              fmt::format("{} cage still intersects the mesh after {} offset iterations",
                          to_string(cage.region), params.max_iterations));
}

Cage duplicate_and_fix_borders(const Cage& cage, const CageParams& params) {
  if (!(cage.offset > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cage must be scaled before its border is duplicated");
  }
  const auto loop = single_loop(cage, "cage rim");
  const std::size_t m = loop.size();
  const Vec3 view = params.view.normalized();
  // Rim in view-plane coordinates; offsetting this polygon by a mitered step
  // moves every rim edge outward by the same distance.
  const Vec3 eu = view.unitOrthogonal();
  const Vec3 ew = view.cross(eu);
  auto dir_of = [&](VertexId v) {
    return v < cage.offset_directions.size() ? cage.offset_directions[v] : Vec3::Zero();
  };
  std::vector<Eigen::Vector2d> q(m);
  double area = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3 anchor = cage.vertices[loop[i]] - cage.offset * dir_of(loop[i]);
    q[i] = {eu.dot(anchor), ew.dot(anchor)};
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = q[i];
    const auto& b = q[(i + 1) % m];
    area += a.x() * b.y() - a.y() * b.x();
  }
  const double sign = area >= 0.0 ? 1.0 : -1.0;
  auto edge_normal = [&](std::size_t i) -> Eigen::Vector2d {
    const Eigen::Vector2d e = q[(i + 1) % m] - q[i];
    const double n = e.norm();
    if (n < 1e-12) return Eigen::Vector2d::Zero();
    return sign * Eigen::Vector2d(e.y(), -e.x()) / n;
  };
  constexpr double kMaxMiter = 4.0;

  Cage out = cage;
  out.offset_directions.resize(out.vertices.size(), Vec3::Zero());
  std::vector<VertexId> dup(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& p = cage.vertices[loop[i]];
    const Eigen::Vector2d n0 = edge_normal((i + m - 1) % m), n1 = edge_normal(i);
    Eigen::Vector2d miter = n0 + n1;
    const double c = miter.norm() > 1e-12 ? miter.normalized().dot(n1.norm() > 0.0 ? n1 : n0) : 0.0;
    miter = c > 1.0 / kMaxMiter ? Eigen::Vector2d(miter.normalized() / c) : Eigen::Vector2d(kMaxMiter * miter.normalized());
    const Eigen::Vector2d xy = q[i] + params.lateral_push * cage.offset * miter;
    const double depth = view.dot(p + cage.offset * dir_of(loop[i]));
    dup[i] = static_cast<VertexId>(out.vertices.size());
    out.vertices.push_back(xy.x() * eu + xy.y() * ew + depth * view);
    out.offset_directions.push_back(Vec3::Zero());
    out.fixed.push_back(dup[i]);
  }
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const std::size_t j = (i + 1) % loop.size();
    const VertexId a = loop[i], b = loop[j];
    out.triangles.push_back({b, a, dup[i]});
    out.triangles.push_back({b, dup[i], dup[j]});
  }
  std::sort(out.fixed.begin(), out.fixed.end());
  return out;
}

Cage close_cage(const Cage& cage, const TriMesh& mesh, const CageParams& params) {
  params.validate();
  const auto loop = single_loop(cage, "close_cage");
  if (loop.size() < 3) throw Error(ErrorCode::InvalidTopology, "open loop has fewer than 3 vertices");
  // The rim is extruded straight back to a plane behind the mesh; the two
  // apexes close that back ring, centered on the rim in the view plane.
  BoundingBox rim;
  for (VertexId v : loop) rim.extend(cage.vertices[v]);
  const Vec3 c = rim.center();
  const double z = mesh.bounds().min.z() - params.back_margin * mesh.bbox_diagonal();
  const double dy = params.apex_spread * rim.extent().y();
  const std::size_t m = loop.size();

  Cage out = cage;
  std::vector<VertexId> ring(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& p = cage.vertices[loop[i]];
    ring[i] = static_cast<VertexId>(out.vertices.size());
    out.vertices.push_back(Vec3(p.x(), p.y(), z));
    out.fixed.push_back(ring[i]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    out.triangles.push_back({loop[j], loop[i], ring[i]});
    out.triangles.push_back({loop[j], ring[i], ring[j]});
  }
  const VertexId top = static_cast<VertexId>(out.vertices.size());
  out.vertices.push_back(Vec3(c.x(), c.y() + dy, z));
  const VertexId bottom = top + 1;
  out.vertices.push_back(Vec3(c.x(), c.y() - dy, z));
  out.offset_directions.resize(out.vertices.size(), Vec3::Zero());
  out.fixed.push_back(top);
  out.fixed.push_back(bottom);
  std::sort(out.fixed.begin(), out.fixed.end());

  // Split the loop at its extreme-x vertices; the arc with the larger mean y
  // fans to the top apex.
  std::size_t imin = 0, imax = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (cage.vertices[loop[i]].x() < cage.vertices[loop[imin]].x()) imin = i;
    if (cage.vertices[loop[i]].x() > cage.vertices[loop[imax]].x()) imax = i;
  }
  if (imin == imax) throw Error(ErrorCode::ConstructionFailure, "open loop has no horizontal extent");
  // Edge i runs loop[i] -> loop[i+1]; arc A covers edges imax .. imin-1.
  std::vector<char> in_a(m, 0);
  double ya = 0.0, yb = 0.0;
  std::size_t na = 0, nb = 0;
  for (std::size_t i = imax; i != imin; i = (i + 1) % m) in_a[i] = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const double y = 0.5 * (cage.vertices[loop[i]].y() + cage.vertices[loop[(i + 1) % m]].y());
    (in_a[i] ? ya : yb) += y;
    ++(in_a[i] ? na : nb);
  }
  const bool a_is_top = ya / static_cast<double>(na) >= yb / static_cast<double>(nb);
  auto apex_of = [&](std::size_t edge) { return (in_a[edge] != 0) == a_is_top ? top : bottom; };
  for (std::size_t i = 0; i < m; ++i) {
    const VertexId a = ring[i], b = ring[(i + 1) % m];
    out.triangles.push_back({b, a, apex_of(i)});
  }
  for (std::size_t i : {imin, imax}) {
    const VertexId in_apex = apex_of((i + m - 1) % m);
    const VertexId out_apex = apex_of(i);
    out.triangles.push_back({ring[i], in_apex, out_apex});
  }
  return out;
}

Cage build_cage(const TriMesh& mesh, const FatPadMap& map, Region region, const CageParams& params) {
  params.validate();
  const Cage shell = front_shell(hull_cage(mesh, map, region), params.view);
  const auto dirs = offset_directions(shell, mesh, map, params);
  double offset = params.alpha(region) * mesh.bbox_diagonal();
  CageDiagnostics last;
  for (int k = 0; k < params.max_iterations; ++k, offset *= params.escalation) {
    Cage cage = close_cage(duplicate_and_fix_borders(offset_cage(shell, dirs, offset), params), mesh, params);
    last = diagnose_cage(cage, mesh, map);
    if (last.ok()) {
      spdlog::debug("{} cage: {} vertices, {} triangles, offset {:.4g}", to_string(region),
                    cage.vertices.size(), cage.triangles.size(), offset);
      return cage;
    }
    spdlog::debug("{} cage offset {:.4g}: {} intersections, {} vertices outside, volume {:.3g}",
                  to_string(region), offset, last.intersections, last.outside_vertices.size(),
                  last.signed_volume);
  }
  throw Error(ErrorCode::ConstructionFailure,
              fmt::format("{} cage invalid after {} offset iterations: manifold={}, euler={}, volume={:.4g}, "
                          "{} mesh intersections, {} pad vertices outside",
                          to_string(region), params.max_iterations, last.closed_manifold,
                          last.euler_characteristic, last.signed_volume, last.intersections,
                          last.outside_vertices.size()));
}

CagePair build_both_cages(const TriMesh& mesh, const FatPadMap& map, const CageParams& params) {
  return {build_cage(mesh, map, Region::Upper, params), build_cage(mesh, map, Region::Lower, params)};
}

std::vector<std::vector<VertexId>> boundary_loops(const Cage& cage) {
  std::set<std::pair<VertexId, VertexId>> half;
  for (const Triangle& t : cage.triangles) {
    for (int k = 0; k < 3; ++k) half.insert({t[k], t[(k + 1) % 3]});
  }
  std::map<VertexId, std::vector<VertexId>> next;
  for (const auto& [a, b] : half) {
    if (!half.count({b, a})) next[a].push_back(b);
  }
  for (const auto& [v, outs] : next) {
    if (outs.size() != 1) {
      throw Error(ErrorCode::InvalidTopology,
                  fmt::format("open boundary is not a simple cycle at cage vertex {}", v));
    }
  }
  std::vector<std::vector<VertexId>> loops;
  std::set<VertexId> seen;
  for (const auto& [start, unused] : next) {
    if (seen.count(start)) continue;
    std::vector<VertexId> loop;
    VertexId v = start;
    while (!seen.count(v)) {
      seen.insert(v);
      loop.push_back(v);
      const auto it = next.find(v);
      if (it == next.end()) throw Error(ErrorCode::InvalidTopology, "open boundary does not close");
      v = it->second.front();
    }
    if (v != start) throw Error(ErrorCode::InvalidTopology, "open boundary is not a simple cycle");
    loops.push_back(std::move(loop));
  }
  return loops;
}

bool is_closed_manifold(const Cage& cage) {
  std::map<std::pair<VertexId, VertexId>, int> half;
  for (const Triangle& t : cage.triangles) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return false;
    for (int k = 0; k < 3; ++k) {
      if (++half[{t[k], t[(k + 1) % 3]}] > 1) return false;
    }
  }
  for (const auto& [e, n] : half) {
    if (!half.count({e.second, e.first})) return false;
  }
  // Vertex links must be single fans.
  std::vector<std::vector<std::pair<VertexId, VertexId>>> fan(cage.vertices.size());
  for (const Triangle& t : cage.triangles) {
    for (int k = 0; k < 3; ++k) fan[t[k]].push_back({t[(k + 1) % 3], t[(k + 2) % 3]});
  }
  for (const auto& f : fan) {
    if (f.empty()) continue;
    std::map<VertexId, VertexId> link(f.begin(), f.end());
    std::size_t steps = 0;
    VertexId v = f.front().first;
    do {
      v = link.at(v);
      ++steps;
    } while (v != f.front().first && steps <= f.size());
    if (steps != f.size()) return false;
  }
  return true;
}

double signed_volume(const Cage& cage) {
  double vol = 0.0;
  for (const Triangle& t : cage.triangles) {
    vol += cage.vertices[t[0]].dot(cage.vertices[t[1]].cross(cage.vertices[t[2]]));
  }
  return vol / 6.0;
}

std::size_t count_intersections(const Cage& cage, const TriMesh& mesh, const std::vector<TriangleId>& subset) {
  if (subset.empty()) return 0;
  const TriangleBvh bvh(mesh.positions(), mesh.triangles(), subset);
  std::size_t hits = 0;
  std::vector<TriangleId> candidates;
  for (const Triangle& t : cage.triangles) {
    const std::array<Vec3, 3> ct{cage.vertices[t[0]], cage.vertices[t[1]], cage.vertices[t[2]]};
    BoundingBox box;
    for (const Vec3& p : ct) box.extend(p);
    candidates.clear();
    bvh.overlapping(box, candidates);
    for (TriangleId m : candidates) {
      const Triangle& mt = mesh.triangle(m);
      if (triangles_intersect(ct, {mesh.position(mt[0]), mesh.position(mt[1]), mesh.position(mt[2])})) ++hits;
    }
  }
  return hits;
}

double winding_number(const Cage& cage, const Vec3& p) {
  double total = 0.0;
  for (const Triangle& t : cage.triangles) {
    total += signed_solid_angle(p, cage.vertices[t[0]], cage.vertices[t[1]], cage.vertices[t[2]]);
  }
  return total / (4.0 * kPi);
}

CageDiagnostics diagnose_cage(const Cage& cage, const TriMesh& mesh, const FatPadMap& map) {
  CageDiagnostics d;
  d.closed_manifold = is_closed_manifold(cage);
  std::set<std::pair<VertexId, VertexId>> edges;
  std::set<VertexId> used;
  for (const Triangle& t : cage.triangles) {
    for (int k = 0; k < 3; ++k) {
      used.insert(t[k]);
      edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
    }
  }
  d.euler_characteristic = static_cast<int>(used.size()) - static_cast<int>(edges.size()) +
                           static_cast<int>(cage.triangles.size());
  d.signed_volume = signed_volume(cage);
  try {
    d.open_loops = boundary_loops(cage).size();
  } catch (const Error&) {
    d.open_loops = kInvalidIndex;
  }
  d.intersections = count_intersections(cage, mesh, region_triangles(mesh, map, cage.region));
  for (VertexId v : region_vertices(map, cage.region)) {
    if (winding_number(cage, mesh.position(v)) < 0.5) d.outside_vertices.push_back(v);
  }
  return d;
}

std::string save_cage(const Cage& cage) {
  json vertices = json::array();
  for (const Vec3& p : cage.vertices) vertices.push_back({p.x(), p.y(), p.z()});
  json triangles = json::array();
  for (const Triangle& t : cage.triangles) triangles.push_back({t[0], t[1], t[2]});
  json binding = json::object();
  for (const auto& [id, v] : cage.handle_binding) binding[id] = v;
  const json doc = {{"region", to_string(cage.region)}, {"vertices", vertices},
                    {"triangles", triangles},          {"handle_binding", binding},
                    {"fixed", cage.fixed},             {"offset", cage.offset}};
  return doc.dump(1);
}

Cage load_cage(std::string_view text) {
  Cage cage;
  try {
    const json doc = json::parse(text);
    cage.region = parse_region(doc.at("region").get<std::string>());
    for (const json& p : doc.at("vertices")) {
      if (!p.is_array() || p.size() != 3) throw Error(ErrorCode::Parse, "cage vertex must have 3 coordinates");
      cage.vertices.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    const auto n = cage.vertices.size();
    auto index = [&](const json& j, const char* what) {
      const auto v = j.get<std::int64_t>();
      if (v < 0 || static_cast<std::size_t>(v) >= n) {
        throw Error(ErrorCode::Validation, fmt::format("cage {} index {} out of range", what, v));
      }
      return static_cast<VertexId>(v);
    };
    for (const json& t : doc.at("triangles")) {
      if (!t.is_array() || t.size() != 3) throw Error(ErrorCode::Parse, "cage triangle must have 3 indices");
      cage.triangles.push_back({index(t[0], "triangle"), index(t[1], "triangle"), index(t[2], "triangle")});
    }
    for (const auto& [id, v] : doc.at("handle_binding").items()) cage.handle_binding[id] = index(v, "binding");
    for (const json& v : doc.at("fixed")) cage.fixed.push_back(index(v, "fixed"));
    std::sort(cage.fixed.begin(), cage.fixed.end());
    cage.fixed.erase(std::unique(cage.fixed.begin(), cage.fixed.end()), cage.fixed.end());
    cage.offset = doc.value("offset", 0.0);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("invalid cage file: {}", e.what()));
  }
  for (const auto& [id, v] : cage.handle_binding) {
    if (cage.is_fixed(v)) throw Error(ErrorCode::Validation, fmt::format("handle {} bound to a fixed vertex", id));
  }
  return cage;
}

void save_cage_file(const Cage& cage, const std::filesystem::path& path) { write_text_file(path, save_cage(cage)); }

Cage load_cage_file(const std::filesystem::path& path) { return load_cage(read_text_file(path)); }

}  // namespace fatpad
