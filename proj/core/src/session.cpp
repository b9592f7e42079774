#include "fatpad/session.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/fmt/fmt.h>

#include "fatpad/error.hpp"

namespace fatpad {

using nlohmann::json;

namespace {

json vec(const Vec3& p) { return json::array({p.x(), p.y(), p.z()}); }

Vec3 parse_vec(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    throw Error(ErrorCode::Parse, fmt::format("'{}' must be an array of 3 numbers", field));
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json with_seq(json msg, const json& request) {
  if (request.is_object() && request.contains("seq")) msg["seq"] = request["seq"];
  return msg;
}

json mesh_delta(const std::vector<Vec3>& positions, const std::vector<VertexId>& changed) {
  json ids = json::array(), flat = json::array();
  for (VertexId v : changed) {
    ids.push_back(v);
    for (int k = 0; k < 3; ++k) flat.push_back(positions[v][k]);
  }
  return {{"type", "meshDelta"}, {"vertices", std::move(ids)}, {"positions", std::move(flat)}};
}

std::vector<VertexId> diff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (a[v] != b[v]) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

std::string required_string(const json& req, const char* field) {
  const auto it = req.find(field);
  if (it == req.end() || !it->is_string()) throw Error(ErrorCode::Parse, fmt::format("missing string '{}'", field));
  return it->get<std::string>();
}

}  // namespace

Session::Session(std::shared_ptr<const Rig> rig, std::size_t undo_depth)
    : rig_(rig), state_(std::move(rig), undo_depth) {}

std::vector<std::string> Session::handle(std::string_view message) {
  json req;
  try {
    req = json::parse(message);
    if (!req.is_object()) throw Error(ErrorCode::Parse, "message must be a JSON object");
    const std::string type = required_string(req, "type");

    if (type == "load") {
      const TriMesh& mesh = rig_->mesh;
      json pos = json::array(), tris = json::array();
      for (const Vec3& p : state_.current_positions()) {
        for (int k = 0; k < 3; ++k) pos.push_back(p[k]);
      }
      for (const Triangle& t : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) tris.push_back(t[k]);
      }
      json handles = json::array();
      for (const Handle& h : rig_->map.handles()) {
        handles.push_back({{"id", h.id},
                           {"pad", h.pad},
                           {"region", to_string(rig_->region_of(h.id))},
                           {"anchor", h.anchor},
                           {"position", vec(state_.current_positions()[h.anchor])}});
      }
      json pads = json::array();
      for (const FatPad& p : rig_->map.pads()) pads.push_back({{"id", p.id}, {"region", to_string(p.region)}});
      return {with_seq({{"type", "load"}, {"protocol", kProtocol}, {"positions", std::move(pos)},
                        {"triangles", std::move(tris)}, {"handles", std::move(handles)}, {"pads", std::move(pads)}},
                       req)
                  .dump()};
    }
    if (type == "grab") {
      const std::string id = required_string(req, "handle");
      const Handle& h = rig_->map.handle(id);
      const FatPad& pad = rig_->map.pad(h.pad);
      json tris = json::array();
      for (TriangleId t : pad_triangles(pad, rig_->mesh)) tris.push_back(t);
      grabbed_ = id;
      return {with_seq({{"type", "highlight"},
                        {"handle", id},
                        {"pad", pad.id},
                        {"vertices", pad.vertices},
                        {"triangles", std::move(tris)},
                        {"anchor", vec(state_.current_positions()[h.anchor])}},
                       req)
                  .dump()};
    }
    if (type == "move") {
      const std::string id = required_string(req, "handle");
      rig_->map.handle(id);
      Vec3 target;
      if (req.contains("position")) {
        target = parse_vec(req["position"], "position");
      } else if (req.contains("delta")) {
        target = state_.handle_position(id) + parse_vec(req["delta"], "delta");
      } else {
        throw Error(ErrorCode::Parse, "move needs 'position' or 'delta'");
      }
      const auto changed = state_.move_handle(id, target);
      return {with_seq(mesh_delta(state_.current_positions(), changed), req).dump()};
    }
    if (type == "release") {
      state_.commit();
      grabbed_.reset();
      return {with_seq(mesh_delta(state_.current_positions(), {}), req).dump()};
    }
    if (type == "undo") {
      const std::vector<Vec3> before = state_.current_positions();
      state_.undo();
      grabbed_.reset();
      return {with_seq(mesh_delta(state_.current_positions(), diff(before, state_.current_positions())), req).dump()};
    }
    throw Error(ErrorCode::Parse, fmt::format("unknown message type '{}'", type));
  } catch (const json::exception& e) {
    return {with_seq({{"type", "error"}, {"code", "parse"}, {"message", e.what()}}, req).dump()};
  } catch (const Error& e) {
    return {with_seq({{"type", "error"}, {"code", std::string(to_string(e.code()))}, {"message", e.detail()}}, req)
                .dump()};
  }
}

std::vector<Vec3> replay_messages(std::shared_ptr<const Rig> rig, const std::vector<std::string>& messages) {
  Session s(std::move(rig));
  for (const std::string& m : messages) s.handle(m);
  return s.state().current_positions();
}

}  // namespace fatpad
