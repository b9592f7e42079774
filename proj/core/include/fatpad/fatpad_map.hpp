#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatpad/mesh.hpp"
#include "fatpad/topology.hpp"

namespace fatpad {

using HandleId = std::string;
using PadId = std::string;

struct Handle {
  HandleId id;
  PadId pad;
  VertexId anchor = 0;
  Vec3 rest_position = Vec3::Zero();
  /// Per-axis multiplier applied to the cage offset direction; (0,0,1) makes
  /// a handle move out only along z (nose handles).
  Vec3 axis_mask = Vec3::Ones();
  bool masked() const { return axis_mask != Vec3::Ones(); }
};

struct FatPad {
  PadId id;
  Region region = Region::Upper;
  std::vector<VertexId> vertices;        // sorted, unique
  std::vector<HandleId> handles;         // in file order
  std::vector<VertexId> movable_border;  // sorted, unique
  std::vector<VertexId> border;          // computed from adjacency, sorted

  bool contains(VertexId v) const;
  bool on_border(VertexId v) const;
  bool movable(VertexId v) const;
};

/// Overlapping fat pads with their handles, bound to one mesh topology.
class FatPadMap {
 public:
  FatPadMap() = default;
  FatPadMap(std::vector<FatPad> pads, std::vector<Handle> handles, std::string fingerprint);

  const std::vector<FatPad>& pads() const { return pads_; }
  /// Sorted by id.
  const std::vector<Handle>& handles() const { return handles_; }
  const std::string& fingerprint() const { return fingerprint_; }

  const FatPad& pad(std::string_view id) const;
  const Handle& handle(std::string_view id) const;
  const Handle* find_handle(std::string_view id) const;
  const FatPad& pad_of(const Handle& h) const { return pad(h.pad); }
  std::vector<const Handle*> handles_in(Region region) const;

  /// Hash of the canonical serialization.
  std::string hash() const;

 private:
  std::vector<FatPad> pads_;
  std::vector<Handle> handles_;
  std::string fingerprint_;
};

std::string to_string(Region r);
Region parse_region(std::string_view text);

/// Pad vertices with a neighbor outside the pad, plus pad vertices on an open
/// boundary of the mesh.
std::vector<VertexId> compute_pad_border(const std::vector<VertexId>& sorted_vertices,
                                         const MeshTopology& topo);

FatPadMap load_map(std::string_view json, const TriMesh& mesh);
FatPadMap load_map_file(const std::filesystem::path& path, const TriMesh& mesh);
std::string save_map(const FatPadMap& map);

/// Rebinds handle rest positions to a mesh with the same topology.
FatPadMap transfer_map(const FatPadMap& map, const TriMesh& target);

/// Closed border loops of a pad, each ordered along the pad's triangles
/// (counter-clockwise seen from the outside). A pad covering a closed surface
/// has no loops.
std::vector<std::vector<VertexId>> pad_border_loops(const FatPad& pad, const TriMesh& mesh);

/// Authoring helper: shrinks a vertex set until its border is a set of simple
/// loops, by repeatedly dropping vertices that touch no pad triangle or where
/// the border pinches. Returns the sorted result.
std::vector<VertexId> regularize_pad(const TriMesh& mesh, std::vector<VertexId> vertices);

/// Triangles whose three corners all belong to the pad.
std::vector<TriangleId> pad_triangles(const FatPad& pad, const TriMesh& mesh);

}  // namespace fatpad
