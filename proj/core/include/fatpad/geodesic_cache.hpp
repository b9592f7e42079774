#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "fatpad/geodesic.hpp"

namespace fatpad {

/// Binary record of a solved field.
///
/// Layout (little-endian):
///   char[8]  magic "FPGEO001"
///   u64      mesh content hash
///   u32      source vertex
///   u32      method (0 exact, 1 refined Dijkstra)
///   u32      refinement
///   u32      reserved (0)
///   u64      n, then f64[n] vertex distances (+inf when unreachable)
///   u64      m, then the method's point-query data:
///              exact: m windows of {u32 edge, u32 towards, f64 b0, b1, sx, sy, d}
///              refined Dijkstra: f64[m] edge subdivision point distances
std::vector<std::uint8_t> serialize_field(const GeodesicField& field, const GeodesicSolver& solver);

/// Throws StaleCache when the record was made for a different mesh and
/// CorruptStream when it cannot be parsed.
GeodesicField deserialize_field(const std::vector<std::uint8_t>& bytes, const GeodesicSolver& solver);

/// Content hash of the solver's mesh, as used in cache keys.
std::uint64_t mesh_content_key(const GeodesicSolver& solver);

/// Memoizes full-surface solves by (mesh content hash, source, method). Safe
/// for concurrent callers; two threads missing the same key may both solve,
/// and the first stored result wins. With a directory set, records are also
/// persisted there and reloaded across runs.
class GeodesicCache {
 public:
  explicit GeodesicCache(std::optional<std::filesystem::path> directory = std::nullopt);

  /// FATPAD_CACHE_DIR when set and non-empty.
  static std::optional<std::filesystem::path> directory_from_env();

  /// Solves with `opts`; results with a finite max_distance are not cached.
  GeodesicField get_or_solve(const GeodesicSolver& solver, VertexId source,
                             const GeodesicOptions& opts = {});

  std::size_t size() const;
  std::size_t hits() const;
  void clear();

 private:
  using Key = std::tuple<std::uint64_t, VertexId, int, int>;
  std::filesystem::path file_for(const Key& key) const;

  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mutex_;
  std::map<Key, GeodesicField> entries_;
  std::atomic<std::size_t> hits_ = 0;
};

}  // namespace fatpad
