#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatpad/fatpad_map.hpp"
#include "fatpad/mesh.hpp"

namespace fatpad {

struct CageParams {
  /// Offset as a fraction of the mesh bbox diagonal; the lower cage uses twice
  /// this value.
  double alpha_base = 0.05;
  double escalation = 1.5;
  int max_iterations = 10;
  /// Closing vertices sit this fraction of the bbox diagonal behind the mesh.
  double back_margin = 0.1;
  /// Closing vertices are split by ±apex_spread · bbox height along y.
  double apex_spread = 0.25;
  /// Outward offset of the duplicate ring's rim polygon within the view
  /// plane, in units of the current offset.
  double lateral_push = 1.0;
  /// Direction towards the viewer. Hull faces facing it form the cage front.
  Vec3 view = Vec3::UnitZ();
  /// Per-handle overrides of the map's axis masks.
  std::map<HandleId, Vec3> axis_masks;

  double alpha(Region r) const { return r == Region::Lower ? 2.0 * alpha_base : alpha_base; }
  void validate() const;
};

struct Cage {
  Region region = Region::Upper;
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::map<HandleId, VertexId> handle_binding;
  std::vector<VertexId> fixed;  // sorted

  /// Offset applied by scale_cage and its per-vertex directions (zero for
  /// unbound vertices). Build-time data; only `offset` is persisted.
  double offset = 0.0;
  std::vector<Vec3> offset_directions;

  bool is_fixed(VertexId v) const;
  std::optional<HandleId> handle_at(VertexId v) const;
  std::uint64_t hash() const;
};

/// Closed hull of the region's handle anchors at rest, one cage vertex per
/// handle (ordered by handle id). Throws DegenerateHull for fewer than four
/// anchors or coplanar anchors, ConstructionFailure when an anchor is not a
/// hull vertex.
Cage hull_cage(const TriMesh& mesh, const FatPadMap& map, Region region);

/// Keeps the hull faces facing `view`, giving an open shell over the face.
/// Throws ConstructionFailure if a handle would lose its vertex.
Cage front_shell(const Cage& hull, const Vec3& view = Vec3::UnitZ());

/// Offsets every bound vertex along its anchor's (masked) vertex normal by
/// alpha(region) · diag, escalating by params.escalation until the cage no
/// longer intersects the region's pad triangles.
Cage scale_cage(const Cage& cage, const TriMesh& mesh, const FatPadMap& map,
                const CageParams& params);

/// Duplicates the single open boundary loop, pushes the copies outward by the
/// cage offset and joins both rings with a triangle strip. Copies are fixed.
Cage duplicate_and_fix_borders(const Cage& cage, const CageParams& params);

/// Closes the single open loop with two fixed vertices behind the mesh.
Cage close_cage(const Cage& cage, const TriMesh& mesh, const CageParams& params);

Cage build_cage(const TriMesh& mesh, const FatPadMap& map, Region region,
                const CageParams& params = {});

struct CagePair {
  Cage upper;
  Cage lower;
  const Cage& operator[](Region r) const { return r == Region::Upper ? upper : lower; }
  Cage& operator[](Region r) { return r == Region::Upper ? upper : lower; }
};

CagePair build_both_cages(const TriMesh& mesh, const FatPadMap& map, const CageParams& params = {});

struct CageDiagnostics {
  bool closed_manifold = false;
  int euler_characteristic = 0;
  double signed_volume = 0.0;
  std::size_t intersections = 0;           // cage vs region pad triangles
  std::vector<VertexId> outside_vertices;  // region pad vertices not enclosed
  std::size_t open_loops = 0;
  bool ok() const {
    return closed_manifold && euler_characteristic == 2 && signed_volume > 0.0 &&
           intersections == 0 && outside_vertices.empty();
  }
};

/// Every boundary edge is counted; `open_loops` is the number of boundary cycles.
CageDiagnostics diagnose_cage(const Cage& cage, const TriMesh& mesh, const FatPadMap& map);

bool is_closed_manifold(const Cage& cage);
double signed_volume(const Cage& cage);
std::vector<std::vector<VertexId>> boundary_loops(const Cage& cage);

/// Triangles whose corners all lie in pads of `region`.
std::vector<TriangleId> region_triangles(const TriMesh& mesh, const FatPadMap& map, Region region);
std::vector<VertexId> region_vertices(const FatPadMap& map, Region region);

/// Exhaustive count of cage triangles touching mesh triangles from `subset`.
std::size_t count_intersections(const Cage& cage, const TriMesh& mesh,
                                const std::vector<TriangleId>& subset);

/// Generalized winding number of `p` with respect to the cage surface.
double winding_number(const Cage& cage, const Vec3& p);

std::string save_cage(const Cage& cage);
Cage load_cage(std::string_view json);
void save_cage_file(const Cage& cage, const std::filesystem::path& path);
Cage load_cage_file(const std::filesystem::path& path);

}  // namespace fatpad
