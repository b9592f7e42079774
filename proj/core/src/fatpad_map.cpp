#include "fatpad/fatpad_map.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "fatpad/error.hpp"
#include "fatpad/hash.hpp"
#include "fatpad/obj_io.hpp"

namespace fatpad {

using nlohmann::json;

namespace {

bool sorted_contains(const std::vector<VertexId>& v, VertexId x) {
  return std::binary_search(v.begin(), v.end(), x);
}

std::vector<VertexId> sorted_unique(std::vector<VertexId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string id_from_json(const json& j, const std::string& what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw Error(ErrorCode::Parse, what + " id must be a string or integer");
}

Vec3 parse_axis_mask(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    Vec3 m = Vec3::Zero();
    for (char c : s) {
      if (c == 'x') m.x() = 1.0;
      else if (c == 'y') m.y() = 1.0;
      else if (c == 'z') m.z() = 1.0;
      else throw Error(ErrorCode::Parse, "axis_mask must combine x, y and z");
    }
    return m;
  }
  if (j.is_array() && j.size() == 3) return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  throw Error(ErrorCode::Parse, "axis_mask must be a string like \"z\" or a 3-vector");
}

}  // namespace

bool FatPad::contains(VertexId v) const { return sorted_contains(vertices, v); }
bool FatPad::on_border(VertexId v) const { return sorted_contains(border, v); }
bool FatPad::movable(VertexId v) const { return sorted_contains(movable_border, v); }

FatPadMap::FatPadMap(std::vector<FatPad> pads, std::vector<Handle> handles, std::string fingerprint)
    : pads_(std::move(pads)), handles_(std::move(handles)), fingerprint_(std::move(fingerprint)) {
  std::sort(handles_.begin(), handles_.end(), [](const Handle& a, const Handle& b) { return a.id < b.id; });
}

const FatPad& FatPadMap::pad(std::string_view id) const {
  for (const FatPad& p : pads_) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown pad '" + std::string(id) + "'");
}

const Handle* FatPadMap::find_handle(std::string_view id) const {
  const auto it = std::lower_bound(handles_.begin(), handles_.end(), id,
                                   [](const Handle& h, std::string_view key) { return h.id < key; });
  return it != handles_.end() && it->id == id ? &*it : nullptr;
}

const Handle& FatPadMap::handle(std::string_view id) const {
  const Handle* h = find_handle(id);
  if (h == nullptr) throw Error(ErrorCode::UnknownHandle, "unknown handle '" + std::string(id) + "'");
  return *h;
}

std::vector<const Handle*> FatPadMap::handles_in(Region region) const {
  std::vector<const Handle*> out;
  for (const Handle& h : handles_) {
    if (pad(h.pad).region == region) out.push_back(&h);
  }
  return out;
}

std::string FatPadMap::hash() const {
  Fnv1a64 h;
  h.update(save_map(*this));
  return to_hex(h.digest());
}

std::string to_string(Region r) { return r == Region::Upper ? "upper" : "lower"; }

Region parse_region(std::string_view text) {
  if (text == "upper") return Region::Upper;
  if (text == "lower") return Region::Lower;
  throw Error(ErrorCode::Parse, "region must be \"upper\" or \"lower\", got \"" + std::string(text) + "\"");
}

std::vector<VertexId> compute_pad_border(const std::vector<VertexId>& sorted_vertices, const MeshTopology& topo) {
  std::vector<VertexId> border;
  for (VertexId v : sorted_vertices) {
    bool edge = topo.is_boundary_vertex(v);
    for (VertexId n : topo.neighbors(v)) {
      if (edge) break;
      edge = !sorted_contains(sorted_vertices, n);
    }
    if (edge) border.push_back(v);
  }
  return border;
}

FatPadMap load_map(std::string_view text, const TriMesh& mesh) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("pad map: ") + e.what());
  }
  const MeshTopology topo(mesh);
  const std::string fingerprint = topology_fingerprint(mesh);
  try {
    if (doc.contains("fingerprint")) {
      const json& fp = doc["fingerprint"];
      if (fp.value("topology", fingerprint) != fingerprint ||
          fp.value("vertex_count", mesh.vertex_count()) != mesh.vertex_count() ||
          fp.value("triangle_count", mesh.triangle_count()) != mesh.triangle_count()) {
        throw Error(ErrorCode::TopologyMismatch, "pad map was authored for a different mesh topology");
      }
    }
    std::vector<FatPad> pads;
    std::vector<Handle> handles;
    std::set<std::string> pad_ids, handle_ids;
    const auto n = static_cast<long long>(mesh.vertex_count());
    auto read_ids = [&](const json& arr, const std::string& pad_id, const char* field) {
      std::vector<VertexId> out;
      for (const json& x : arr) {
        const auto v = x.get<long long>();
        if (v < 0 || v >= n) {
          throw Error(ErrorCode::Validation, "pad '" + pad_id + "': " + field + " vertex " + std::to_string(v) +
                                                 " out of range");
        }
        out.push_back(static_cast<VertexId>(v));
      }
      return out;
    };
    for (const json& jp : doc.at("pads")) {
      FatPad pad;
      pad.id = id_from_json(jp.at("id"), "pad");
      if (!pad_ids.insert(pad.id).second) throw Error(ErrorCode::Validation, "duplicate pad id '" + pad.id + "'");
      pad.region = parse_region(jp.at("region").get<std::string>());
      pad.vertices = sorted_unique(read_ids(jp.at("vertices"), pad.id, "vertices"));
      if (pad.vertices.empty()) throw Error(ErrorCode::Validation, "pad '" + pad.id + "' has no vertices");
      pad.movable_border = sorted_unique(read_ids(jp.value("movable_border", json::array()), pad.id, "movable_border"));
      pad.border = compute_pad_border(pad.vertices, topo);
      for (VertexId v : pad.movable_border) {
        if (!pad.on_border(v)) {
          throw Error(ErrorCode::Validation, "pad '" + pad.id + "': movable_border vertex " + std::to_string(v) +
                                                 " is not on the pad border");
        }
      }
      const json& jh = jp.at("handles");
      if (jh.empty()) throw Error(ErrorCode::Validation, "pad '" + pad.id + "' has no handles");
      for (const json& h : jh) {
        Handle handle;
        handle.id = id_from_json(h.at("id"), "handle");
        if (!handle_ids.insert(handle.id).second) {
          throw Error(ErrorCode::Validation, "duplicate handle id '" + handle.id + "'");
        }
        handle.pad = pad.id;
        const auto anchor = h.at("anchor").get<long long>();
        if (anchor < 0 || anchor >= n || !pad.contains(static_cast<VertexId>(anchor))) {
          throw Error(ErrorCode::Validation, "pad '" + pad.id + "': handle '" + handle.id + "' anchor " +
                                                 std::to_string(anchor) + " is not a pad vertex");
        }
        handle.anchor = static_cast<VertexId>(anchor);
        if (pad.on_border(handle.anchor)) {
          throw Error(ErrorCode::Validation, "pad '" + pad.id + "': handle '" + handle.id + "' anchor " +
                                                 std::to_string(anchor) + " lies on the pad border");
        }
        handle.rest_position = mesh.position(handle.anchor);
        if (h.contains("axis_mask")) handle.axis_mask = parse_axis_mask(h["axis_mask"]);
        pad.handles.push_back(handle.id);
        handles.push_back(std::move(handle));
      }
      pads.push_back(std::move(pad));
    }
    return FatPadMap(std::move(pads), std::move(handles), fingerprint);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("pad map: ") + e.what());
  }
}

FatPadMap load_map_file(const std::filesystem::path& path, const TriMesh& mesh) {
  return load_map(read_text_file(path), mesh);
}

std::string save_map(const FatPadMap& map) {
  json pads = json::array();
  for (const FatPad& p : map.pads()) {
    json handles = json::array();
    for (const HandleId& id : p.handles) {
      const Handle& h = map.handle(id);
      json jh = {{"id", h.id}, {"anchor", h.anchor}};
      if (h.masked()) jh["axis_mask"] = {h.axis_mask.x(), h.axis_mask.y(), h.axis_mask.z()};
      handles.push_back(std::move(jh));
    }
    pads.push_back({{"id", p.id},
                    {"region", to_string(p.region)},
                    {"vertices", p.vertices},
                    {"movable_border", p.movable_border},
                    {"handles", std::move(handles)}});
  }
  json doc = {{"fingerprint", {{"topology", map.fingerprint()}}}, {"pads", std::move(pads)}};
  return doc.dump(1) + "\n";
}

FatPadMap transfer_map(const FatPadMap& map, const TriMesh& target) {
  if (topology_fingerprint(target) != map.fingerprint()) {
    throw Error(ErrorCode::TopologyMismatch, "target mesh topology differs from the map's");
  }
  std::vector<Handle> handles = map.handles();
  for (Handle& h : handles) h.rest_position = target.position(h.anchor);
  return FatPadMap(map.pads(), std::move(handles), map.fingerprint());
}

std::vector<TriangleId> pad_triangles(const FatPad& pad, const TriMesh& mesh) {
  std::vector<TriangleId> out;
  for (TriangleId t = 0; t < mesh.triangle_count(); ++t) {
    const Triangle& tri = mesh.triangle(t);
    if (pad.contains(tri[0]) && pad.contains(tri[1]) && pad.contains(tri[2])) out.push_back(t);
  }
  return out;
}

std::vector<VertexId> regularize_pad(const TriMesh& mesh, std::vector<VertexId> vertices) {
  vertices = sorted_unique(std::move(vertices));
  std::vector<char> in(mesh.vertex_count(), 0);
  for (VertexId v : vertices) in[v] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> tri_count(mesh.vertex_count(), 0);
    std::map<std::pair<VertexId, VertexId>, int> half;
    for (const Triangle& t : mesh.triangles()) {
      if (!in[t[0]] || !in[t[1]] || !in[t[2]]) continue;
      for (int k = 0; k < 3; ++k) {
        ++tri_count[t[k]];
        ++half[{t[k], t[(k + 1) % 3]}];
      }
    }
    std::vector<int> out_boundary(mesh.vertex_count(), 0);
    for (const auto& [e, c] : half) {
      if (!half.count({e.second, e.first})) ++out_boundary[e.first];
    }
    for (VertexId v : vertices) {
      if (in[v] && (tri_count[v] == 0 || out_boundary[v] > 1)) {
        in[v] = 0;
        changed = true;
      }
    }
  }
  std::vector<VertexId> out;
  for (VertexId v : vertices) {
    if (in[v]) out.push_back(v);
  }
  return out;
}

std::vector<std::vector<VertexId>> pad_border_loops(const FatPad& pad, const TriMesh& mesh) {
  std::set<std::pair<VertexId, VertexId>> half;
  for (TriangleId t : pad_triangles(pad, mesh)) {
    const Triangle& tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) half.emplace(tri[k], tri[(k + 1) % 3]);
  }
  std::map<VertexId, std::vector<VertexId>> next;
  for (const auto& [a, b] : half) {
    if (!half.count({b, a})) next[a].push_back(b);
  }
  std::vector<VertexId> bad;
  for (const auto& [v, outs] : next) {
    if (outs.size() != 1) bad.push_back(v);
  }
  for (VertexId v : pad.border) {
    if (!next.count(v)) bad.push_back(v);  // border vertex without a pad triangle edge
  }
  for (const auto& [v, outs] : next) {
    if (!pad.on_border(v)) bad.push_back(v);
  }
  if (!bad.empty()) {
    bad = sorted_unique(bad);
    std::string list;
    for (VertexId v : bad) list += (list.empty() ? "" : ", ") + std::to_string(v);
    throw Error(ErrorCode::InvalidTopology, "pad '" + pad.id + "' has non-manifold border at vertices " + list);
  }
  std::vector<std::vector<VertexId>> loops;
  std::set<VertexId> seen;
  for (const auto& [start, outs] : next) {
    if (seen.count(start)) continue;
    std::vector<VertexId> loop;
    VertexId v = start;
    while (!seen.count(v)) {
      seen.insert(v);
      loop.push_back(v);
      v = next.at(v).front();
    }
    if (v != start) throw Error(ErrorCode::InvalidTopology, "pad '" + pad.id + "' border does not close");
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace fatpad
