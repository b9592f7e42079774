#include "fatpad/posing.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fatpad/error.hpp"
#include "fatpad/hash.hpp"

namespace fatpad {

using nlohmann::json;

namespace {

int index_of(Region r) { return r == Region::Upper ? 0 : 1; }
Region region_at(int i) { return i == 0 ? Region::Upper : Region::Lower; }

}  // namespace

const WeightMatrix& Rig::weights_of(std::string_view handle) const {
  const auto it = std::lower_bound(weights.begin(), weights.end(), handle,
                                   [](const WeightMatrix& m, std::string_view id) { return m.handle < id; });
  if (it == weights.end() || it->handle != handle) {
    throw Error(ErrorCode::UnknownHandle, fmt::format("no weights for handle '{}'", handle));
  }
  return *it;
}

Region Rig::region_of(std::string_view handle) const {
  const Handle& h = map.handle(handle);
  return map.pad(h.pad).region;
}

void validate_rig(const Rig& rig) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::Validation, msg); };
  if (rig.map.fingerprint() != topology_fingerprint(rig.mesh)) fail("pad map does not belong to the mesh");
  if (rig.weights.size() != rig.map.handles().size()) {
    fail(fmt::format("{} weight matrices for {} handles", rig.weights.size(), rig.map.handles().size()));
  }
  for (std::size_t i = 0; i < rig.weights.size(); ++i) {
    if (rig.weights[i].handle != rig.map.handles()[i].id) fail("weight matrices are not ordered by handle id");
  }
  const std::uint64_t mesh_hash = parse_hex(content_hash(rig.mesh));
  for (Region r : {Region::Upper, Region::Lower}) {
    const Cage& cage = rig.cages[r];
    const GCBinding& b = rig.binding(r);
    if (cage.region != r) fail(fmt::format("{} cage is tagged {}", to_string(r), to_string(cage.region)));
    if (b.cage_hash != cage.hash()) fail(fmt::format("{} binding belongs to another cage", to_string(r)));
    if (b.mesh_hash != mesh_hash) fail(fmt::format("{} binding belongs to another mesh", to_string(r)));
    for (const auto& [id, v] : cage.handle_binding) {
      if (rig.region_of(id) != r) fail(fmt::format("handle '{}' bound to the {} cage", id, to_string(r)));
      if (cage.is_fixed(v)) fail(fmt::format("handle '{}' bound to a fixed cage vertex", id));
    }
  }
  for (const Handle& h : rig.map.handles()) {
    if (!rig.cages[rig.region_of(h.id)].handle_binding.count(h.id)) fail(fmt::format("handle '{}' has no cage vertex", h.id));
  }
}

PoseState::PoseState(std::shared_ptr<const Rig> rig, std::size_t undo_depth)
    : rig_(std::move(rig)), undo_depth_(undo_depth) {
  if (!rig_) throw Error(ErrorCode::InvalidArgument, "pose state needs a rig");
  base_ = rig_->mesh.positions();
  current_ = base_;
  for (int i = 0; i < 2; ++i) {
    const Region r = region_at(i);
    RegionState& s = regions_[i];
    const GCBinding& b = rig_->binding(r);
    s.cage = rig_->cages[r].vertices;
    s.cage_base = s.cage;
    s.gc_base = evaluate(b, s.cage);
    s.gc_now = s.gc_base;
    s.weight = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.vertices.size()));
    row_of_[i].assign(rig_->mesh.vertex_count(), kInvalidIndex);
    for (std::size_t row = 0; row < b.vertices.size(); ++row) row_of_[i][b.vertices[row]] = static_cast<std::uint32_t>(row);
  }
}

Vec3 PoseState::handle_position(std::string_view handle) const {
  const Region r = rig_->region_of(handle);
  return region(r).cage[rig_->cages[r].handle_binding.at(std::string(handle))];
}

std::vector<VertexId> PoseState::move_handle(std::string_view handle, const Vec3& position) {
  const Region r = rig_->region_of(handle);
  const auto& binding = rig_->cages[r].handle_binding;
  const auto it = binding.find(std::string(handle));
  if (it == binding.end()) throw Error(ErrorCode::UnknownHandle, fmt::format("handle '{}' has no cage vertex", handle));
  return move_cage_vertex(r, it->second, position);
}

std::vector<VertexId> PoseState::move_cage_vertex(Region r, VertexId vertex, const Vec3& position) {
  const Cage& cage = rig_->cages[r];
  if (vertex >= cage.vertices.size()) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("cage vertex {} out of range", vertex));
  }
  if (cage.is_fixed(vertex)) {
    throw Error(ErrorCode::FixedVertex, fmt::format("{} cage vertex {} is fixed", to_string(r), vertex));
  }
  if (!position.allFinite()) throw Error(ErrorCode::InvalidArgument, "handle position must be finite");
  RegionState& s = region(r);
  const int ri = index_of(r);
  s.cage[vertex] = position;
  const auto handle = cage.handle_at(vertex);
  if (handle && active_.insert(*handle).second) {
    for (const auto& [v, w] : rig_->weights_of(*handle).entries) {
      const std::uint32_t row = row_of_[ri][v];
      if (row != kInvalidIndex) s.weight[row] = std::max(s.weight[row], w);
    }
    s.rows.clear();
    for (Eigen::Index row = 0; row < s.weight.size(); ++row) {
      if (s.weight[row] > 0.0) s.rows.push_back(static_cast<std::uint32_t>(row));
    }
  }
  return apply(r);
}

std::vector<VertexId> PoseState::apply(Region r) {
  RegionState& s = region(r);
  const GCBinding& b = rig_->binding(r);
  s.gc_now = evaluate(b, s.cage);
  std::vector<VertexId> changed;
  for (std::uint32_t row : s.rows) {
    const VertexId v = b.vertices[row];
    Vec3 p = base_[v];
    for (int i = 0; i < 2; ++i) {
      const std::uint32_t k = row_of_[i][v];
      if (k == kInvalidIndex) continue;
      const RegionState& t = regions_[i];
      const double w = t.weight[k];
      if (w > 0.0) p += w * (t.gc_now.row(k) - t.gc_base.row(k)).transpose();
    }
    if (p != current_[v]) {
      current_[v] = p;
      changed.push_back(v);
    }
  }
  return changed;
}

void PoseState::reset_interaction() {
  active_.clear();
  for (RegionState& s : regions_) {
    s.cage_base = s.cage;
    s.gc_base = s.gc_now;
    s.weight.setZero();
    s.rows.clear();
  }
}

void PoseState::commit() {
  Snapshot snap;
  snap.base = base_;
  for (int i = 0; i < 2; ++i) {
    snap.cage[i] = regions_[i].cage_base;
    snap.gc_base[i] = regions_[i].gc_base;
  }
  undo_.push_back(std::move(snap));
  while (undo_.size() > undo_depth_) undo_.pop_front();
  base_ = current_;
  reset_interaction();
}

bool PoseState::undo() {
  if (undo_.empty()) return false;
  Snapshot snap = std::move(undo_.back());
  undo_.pop_back();
  base_ = std::move(snap.base);
  current_ = base_;
  for (int i = 0; i < 2; ++i) {
    regions_[i].cage = std::move(snap.cage[i]);
    regions_[i].gc_now = std::move(snap.gc_base[i]);
  }
  reset_interaction();
  return true;
}

std::uint64_t PoseState::hash() const {
  Fnv1a64 h;
  for (const Vec3& p : current_) {
    for (int k = 0; k < 3; ++k) h.update_f64(p[k]);
  }
  return h.digest();
}

PoseFile make_pose_file(const Rig& rig, std::vector<PoseEdit> edits) {
  return {content_hash(rig.mesh), rig.map.hash(), std::move(edits)};
}

std::string save_pose(const PoseFile& pose) {
  json edits = json::array();
  for (const PoseEdit& e : pose.edits) {
    edits.push_back({{"handle", e.handle}, {"displacement", {e.displacement.x(), e.displacement.y(), e.displacement.z()}}});
  }
  return json{{"fingerprint", pose.fingerprint}, {"map_hash", pose.map_hash}, {"edits", edits}}.dump(1);
}

PoseFile load_pose(std::string_view text) {
  PoseFile pose;
  try {
    const json doc = json::parse(text);
    pose.fingerprint = doc.at("fingerprint").get<std::string>();
    pose.map_hash = doc.value("map_hash", std::string());
    for (const json& e : doc.at("edits")) {
      const json& d = e.at("displacement");
      if (!d.is_array() || d.size() != 3) throw Error(ErrorCode::Parse, "displacement must have 3 components");
      pose.edits.push_back({e.at("handle").get<std::string>(), Vec3(d[0].get<double>(), d[1].get<double>(), d[2].get<double>())});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("invalid pose file: {}", e.what()));
  }
  return pose;
}

PoseState apply_pose_script(std::shared_ptr<const Rig> rig, const PoseFile& pose, std::size_t undo_depth) {
  if (!rig) throw Error(ErrorCode::InvalidArgument, "pose script needs a rig");
  if (pose.fingerprint != content_hash(rig->mesh)) {
    throw Error(ErrorCode::TopologyMismatch, "pose file was recorded on another mesh");
  }
  if (!pose.map_hash.empty() && pose.map_hash != rig->map.hash()) {
    throw Error(ErrorCode::TopologyMismatch, "pose file was recorded with another pad map");
  }
  PoseState state(std::move(rig), undo_depth);
  for (const PoseEdit& e : pose.edits) {
    state.move_handle(e.handle, state.handle_position(e.handle) + e.displacement);
    state.commit();
  }
  return state;
}

}  // namespace fatpad
