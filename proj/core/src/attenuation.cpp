#include "fatpad/attenuation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fatpad/error.hpp"
#include "fatpad/parallel.hpp"

namespace fatpad {

double WeightMatrix::weight(VertexId v) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), v,
                                   [](const auto& e, VertexId key) { return e.first < key; });
  return it != entries.end() && it->first == v ? it->second : 0.0;
}

double attenuation_weight(double d_vh, double d_ih) {
  if (!(d_ih > 0.0)) throw Error(ErrorCode::InvalidHandlePlacement, "handle lies on the pad border");
  const double r = d_vh - d_ih;
  return std::clamp(r * r / (d_ih * d_ih), 0.0, 1.0);
}

AttenuationEngine::AttenuationEngine(const TriMesh& mesh, const FatPadMap& map, AttenuationParams params,
                                     std::shared_ptr<GeodesicCache> cache)
    : mesh_(mesh),
      map_(map),
      params_(params),
      solver_(std::make_shared<GeodesicSolver>(mesh)),
      cache_(cache ? std::move(cache) : std::make_shared<GeodesicCache>()) {
  if (map.fingerprint() != topology_fingerprint(mesh)) {
    throw Error(ErrorCode::TopologyMismatch, "pad map does not belong to this mesh");
  }
  for (const FatPad& pad : map.pads()) {
    loops_.emplace(pad.id, pad_border_loops(pad, mesh));
    Vec3 n = Vec3::Zero();
    for (VertexId v : pad.vertices) n += mesh.normal(v);
    pad_normal_.emplace(pad.id, n.norm() > 0.0 ? Vec3(n.normalized()) : Vec3(Vec3::UnitZ()));
  }
}

const std::vector<std::vector<VertexId>>& AttenuationEngine::border_loops(std::string_view pad) const {
  const auto it = loops_.find(pad);
  if (it == loops_.end()) throw Error(ErrorCode::InvalidArgument, "unknown pad '" + std::string(pad) + "'");
  return it->second;
}

GeodesicField AttenuationEngine::handle_field(const Handle& h) const {
  return cache_->get_or_solve(*solver_, h.anchor, params_.geodesic);
}

SurfacePoint AttenuationEngine::edge_point(VertexId a, VertexId b, double t) const {
  const EdgeId e = solver_->topology().find_edge(a, b);
  const TriangleId f = solver_->topology().edge(e).faces[0];
  const Triangle& tri = mesh_.triangle(f);
  SurfacePoint p{f, Vec3::Zero()};
  for (int k = 0; k < 3; ++k) {
    if (tri[k] == a) p.barycentric[k] = 1.0 - t;
    if (tri[k] == b) p.barycentric[k] = t;
  }
  return p;
}

std::vector<AttenuationEngine::Candidate> AttenuationEngine::plane_candidates(const Handle& h, const Vec3& normal,
                                                                             VertexId v,
                                                                             const GeodesicField& hf) const {
  const Vec3 H = mesh_.position(h.anchor);
  const Vec3 V = mesh_.position(v);
  const Vec3 hv = V - H;
  const Vec3 plane_n = hv.cross(normal);
  std::vector<Candidate> out;
  if (plane_n.norm() <= 1e-12 * hv.norm()) return out;  // v straight above h: plane undefined
  // Directions are compared in the tangent plane of the handle.
  auto tangent = [&](const Vec3& d) { return Vec3(d - d.dot(normal) * normal); };
  const Vec3 tv = tangent(hv);
  const double tv_norm = tv.norm();
  const double d_hv = hf[v];
  const auto& loops = border_loops(h.pad);
  for (std::size_t l = 0; l < loops.size(); ++l) {
    const auto& loop = loops[l];
    for (std::size_t s = 0; s < loop.size(); ++s) {
      const VertexId a = loop[s], b = loop[(s + 1) % loop.size()];
      const Vec3& A = mesh_.position(a);
      const Vec3& B = mesh_.position(b);
      const double sa = plane_n.dot(A - H);
      const double sb = plane_n.dot(B - H);
      // A vertex lying on the plane counts once, for the segment it starts.
      double t;
      if (sa == 0.0) {
        t = 0.0;
      } else if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
        t = sa / (sa - sb);
      } else {
        continue;
      }
      const Vec3 X = A + t * (B - A);
      const Vec3 tx = tangent(X - H);
      const double denom = tx.norm() * tv_norm;
      if (!(denom > 0.0) || tx.dot(tv) / denom <= 1.0 - params_.direction_epsilon) continue;
      if (params_.euclidean_betweenness) {
        if (!(hv.norm() < (X - H).norm())) continue;
      } else {
        if (!(d_hv < hf.at_edge(a, b, t))) continue;
      }
      out.push_back({l, s, t, X});
    }
  }
  return out;
}

IntersectionResult AttenuationEngine::intersection_with(const Handle& h, VertexId v, const GeodesicField& hf) const {
  const FatPad& pad = map_.pad(h.pad);
  if (!pad.contains(v)) throw Error(ErrorCode::InvalidArgument, "vertex is not in the handle's pad");
  if (v == h.anchor) throw Error(ErrorCode::InvalidArgument, "vertex is the handle anchor");
  const auto& loops = border_loops(h.pad);
  if (loops.empty()) throw Error(ErrorCode::InvalidTopology, "pad '" + pad.id + "' has no border");

  IntersectionResult r;
  if (pad.on_border(v)) {
    for (const auto& loop : loops) {
      const auto it = std::find(loop.begin(), loop.end(), v);
      if (it == loop.end()) continue;
      r.edge_a = v;
      r.edge_b = loop[(static_cast<std::size_t>(it - loop.begin()) + 1) % loop.size()];
      break;
    }
    r.point = edge_point(r.edge_a, r.edge_b, 0.0);
    r.position = mesh_.position(v);
    r.d_ih = hf[v];
    return r;
  }

  std::vector<Candidate> cands = plane_candidates(h, mesh_.normal(h.anchor), v, hf);
  if (cands.empty()) {
    r.used_pad_normal = true;
    cands = plane_candidates(h, pad_normal_.find(h.pad)->second, v, hf);
  }
  if (cands.empty()) {
    throw Error(ErrorCode::NoIntersection, "no border intersection for vertex " + std::to_string(v) +
                                               " of handle '" + h.id + "'");
  }
  r.candidates_considered = cands.size();
  std::size_t best = 0;
  if (cands.size() > 1) {
    // Only d(v, i) can separate the survivors; solve from v just far enough.
    double reach = 0.0;
    for (const Candidate& c : cands) {
      const auto& loop = loops[c.loop];
      reach = std::max(reach, hf.at_edge(loop[c.segment], loop[(c.segment + 1) % loop.size()], c.t));
    }
    GeodesicOptions opts = params_.geodesic;
    opts.max_distance = (hf[v] + reach) * (1.0 + 1e-9) + 1e-12;
    const GeodesicField vf = solver_->solve_from(v, opts);
    double best_d = kInfinity;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const auto& loop = loops[cands[k].loop];
      const double d = vf.at_edge(loop[cands[k].segment], loop[(cands[k].segment + 1) % loop.size()], cands[k].t);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
  }
  const Candidate& c = cands[best];
  const auto& loop = loops[c.loop];
  r.edge_a = loop[c.segment];
  r.edge_b = loop[(c.segment + 1) % loop.size()];
  r.t = c.t;
  r.position = c.position;
  r.point = edge_point(r.edge_a, r.edge_b, c.t);
  r.d_ih = hf.at_edge(r.edge_a, r.edge_b, c.t);
  return r;
}

IntersectionResult AttenuationEngine::border_intersection(const Handle& h, VertexId v) const {
  return intersection_with(h, v, handle_field(h));
}

double AttenuationEngine::compute_weight_with(const Handle& h, VertexId v, const GeodesicField& hf,
                                              bool* retried) const {
  const FatPad& pad = map_.pad(h.pad);
  if (v == h.anchor) return 1.0;
  if (!pad.contains(v)) return 0.0;
  if (pad.movable(v)) return 1.0;
  if (pad.on_border(v)) return 0.0;
  const IntersectionResult r = intersection_with(h, v, hf);
  if (retried != nullptr) *retried = r.used_pad_normal;
  return attenuation_weight(hf[v], r.d_ih);
}

double AttenuationEngine::compute_weight(const Handle& h, VertexId v) const {
  return compute_weight_with(h, v, handle_field(h), nullptr);
}

WeightMatrix AttenuationEngine::build_weight_matrix(const Handle& h, WeightReport* report) const {
  const FatPad& pad = map_.pad(h.pad);
  if (border_loops(h.pad).empty()) throw Error(ErrorCode::InvalidTopology, "pad '" + pad.id + "' has no border");
  const GeodesicField hf = handle_field(h);
  WeightMatrix m;
  m.handle = h.id;
  m.entries.reserve(pad.vertices.size());
  std::vector<VertexId> unresolved;
  std::size_t retries = 0;
  for (VertexId v : pad.vertices) {
    double w = 0.0;
    bool retried = false;
    try {
      w = compute_weight_with(h, v, hf, &retried);
      retries += retried;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoIntersection) throw;
      unresolved.push_back(v);
    }
    m.entries.emplace_back(v, w);
  }
  if (!unresolved.empty()) {
    spdlog::warn("handle '{}': {} of {} pad vertices have no border intersection; weight set to 0", h.id,
                 unresolved.size(), pad.vertices.size());
  }
  if (static_cast<double>(unresolved.size()) > params_.max_unresolved_fraction * static_cast<double>(pad.vertices.size())) {
    throw Error(ErrorCode::NoIntersection, "handle '" + h.id + "': " + std::to_string(unresolved.size()) + " of " +
                                               std::to_string(pad.vertices.size()) +
                                               " pad vertices have no border intersection");
  }
  if (report != nullptr) {
    for (VertexId v : unresolved) report->unresolved.emplace_back(h.id, v);
    report->pad_normal_retries += retries;
  }
  return m;
}

std::vector<WeightMatrix> build_all_weight_matrices(const AttenuationEngine& engine, const FatPadMap& map,
                                                    WeightReport* report) {
  const auto& handles = map.handles();
  std::vector<WeightMatrix> out(handles.size());
  std::vector<WeightReport> reports(handles.size());
  parallel_for(
      handles.size(), [&](std::size_t i) { out[i] = engine.build_weight_matrix(handles[i], &reports[i]); },
      engine.params().threads);
  if (report != nullptr) {
    for (const WeightReport& r : reports) {
      report->unresolved.insert(report->unresolved.end(), r.unresolved.begin(), r.unresolved.end());
      report->pad_normal_retries += r.pad_normal_retries;
    }
  }
  return out;
}

std::string save_weights(const std::vector<WeightMatrix>& matrices, const TriMesh& mesh, const FatPadMap& map) {
  nlohmann::json mats = nlohmann::json::array();
  for (const WeightMatrix& m : matrices) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [v, w] : m.entries) entries.push_back({v, w});
    mats.push_back({{"handle", m.handle}, {"entries", std::move(entries)}});
  }
  nlohmann::json doc = {{"mesh_fingerprint", content_hash(mesh)}, {"map_hash", map.hash()}, {"matrices", mats}};
  return doc.dump() + "\n";
}

std::vector<WeightMatrix> load_weights(std::string_view text, const TriMesh& mesh, const FatPadMap& map) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptStream, std::string("weights: ") + e.what());
  }
  try {
    if (doc.at("mesh_fingerprint").get<std::string>() != content_hash(mesh)) {
      throw Error(ErrorCode::StaleCache, "weights were computed for a different mesh");
    }
    if (doc.at("map_hash").get<std::string>() != map.hash()) {
      throw Error(ErrorCode::StaleCache, "weights were computed for a different pad map");
    }
    std::vector<WeightMatrix> out;
    for (const auto& jm : doc.at("matrices")) {
      WeightMatrix m;
      m.handle = jm.at("handle").get<std::string>();
      for (const auto& e : jm.at("entries")) {
        const auto v = e.at(0).get<long long>();
        const double w = e.at(1).get<double>();
        if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertex_count() || !(w >= 0.0 && w <= 1.0)) {
          throw Error(ErrorCode::CorruptStream, "weights: entry out of range");
        }
        m.entries.emplace_back(static_cast<VertexId>(v), w);
      }
      std::sort(m.entries.begin(), m.entries.end());
      out.push_back(std::move(m));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptStream, std::string("weights: ") + e.what());
  }
}

}  // namespace fatpad
