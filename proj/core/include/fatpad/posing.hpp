#pragma once

#include <array>
#include <deque>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fatpad/attenuation.hpp"
#include "fatpad/cage.hpp"
#include "fatpad/green_coords.hpp"

namespace fatpad {

/// Everything the posing engine needs, built offline: mesh, pad map, the two
/// cages with their bindings, and one weight matrix per handle.
struct Rig {
  TriMesh mesh;
  FatPadMap map;
  CagePair cages;
  GCBinding upper_binding;
  GCBinding lower_binding;
  std::vector<WeightMatrix> weights;  // ordered by handle id

  const GCBinding& binding(Region r) const { return r == Region::Upper ? upper_binding : lower_binding; }
  const WeightMatrix& weights_of(std::string_view handle) const;
  /// Region of the cage the handle is bound to. Throws UnknownHandle.
  Region region_of(std::string_view handle) const;
};

/// Throws Validation when cages, bindings, weights and map disagree.
void validate_rig(const Rig& rig);

/// Live pose of one session. Edits within an interaction blend per vertex
/// with the largest weight among the active handles of each cage:
///   V' = base + sum over cages c of (GC_c(now) - GC_c(base)) * w_c
/// where GC_c(base) is the cage's evaluation at the last commit.
class PoseState {
 public:
  explicit PoseState(std::shared_ptr<const Rig> rig, std::size_t undo_depth = 64);

  const Rig& rig() const { return *rig_; }
  const std::vector<Vec3>& current_positions() const { return current_; }
  const std::vector<Vec3>& base_positions() const { return base_; }
  const std::vector<Vec3>& cage_positions(Region r) const { return region(r).cage; }
  const std::set<HandleId>& active_handles() const { return active_; }
  std::size_t undo_size() const { return undo_.size(); }
  std::size_t undo_depth() const { return undo_depth_; }

  /// Current position of the handle's cage vertex.
  Vec3 handle_position(std::string_view handle) const;

  /// Moves the handle's cage vertex to `position`; returns the vertices whose
  /// current position changed, sorted.
  std::vector<VertexId> move_handle(std::string_view handle, const Vec3& position);
  /// Same for a cage vertex addressed directly. Fixed vertices are rejected
  /// with FixedVertex.
  std::vector<VertexId> move_cage_vertex(Region r, VertexId vertex, const Vec3& position);

  void commit();
  /// Restores the state before the last commit. Returns false (and changes
  /// nothing) when there is nothing to undo.
  bool undo();

  std::uint64_t hash() const;

 private:
  struct RegionState {
    std::vector<Vec3> cage;
    std::vector<Vec3> cage_base;  // cage at the last commit
    PositionMatrix gc_base;
    PositionMatrix gc_now;
    Eigen::VectorXd weight;           // per bound vertex: max over active handles
    std::vector<std::uint32_t> rows;  // bound rows with weight > 0, sorted
  };
  struct Snapshot {
    std::vector<Vec3> base;
    std::array<std::vector<Vec3>, 2> cage;
    std::array<PositionMatrix, 2> gc_base;
  };

  RegionState& region(Region r) { return regions_[r == Region::Upper ? 0 : 1]; }
  const RegionState& region(Region r) const { return regions_[r == Region::Upper ? 0 : 1]; }
  std::vector<VertexId> apply(Region r);
  void reset_interaction();

  std::shared_ptr<const Rig> rig_;
  std::size_t undo_depth_;
  std::vector<Vec3> base_;
  std::vector<Vec3> current_;
  std::array<RegionState, 2> regions_;
  std::array<std::vector<std::uint32_t>, 2> row_of_;  // mesh vertex -> binding row
  std::set<HandleId> active_;
  std::deque<Snapshot> undo_;
};

struct PoseEdit {
  HandleId handle;
  Vec3 displacement = Vec3::Zero();
};

/// Replayable edit list. Each edit moves the handle's cage vertex by its
/// displacement from where it stands, then commits.
struct PoseFile {
  std::string fingerprint;  // mesh content hash
  std::string map_hash;
  std::vector<PoseEdit> edits;
};

PoseFile make_pose_file(const Rig& rig, std::vector<PoseEdit> edits = {});
std::string save_pose(const PoseFile& pose);
PoseFile load_pose(std::string_view json);

/// Applies the edits to a fresh state. Throws TopologyMismatch when the file
/// was recorded on another mesh or map.
PoseState apply_pose_script(std::shared_ptr<const Rig> rig, const PoseFile& pose, std::size_t undo_depth = 64);

}  // namespace fatpad
