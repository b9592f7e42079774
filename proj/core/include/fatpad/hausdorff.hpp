#pragma once

#include <cstdint>
#include <vector>

#include "fatpad/mesh.hpp"

namespace fatpad {

struct HausdorffOptions {
  /// Average samples per triangle; the total 10 * T points are distributed
  /// over the surface proportionally to triangle area.
  double samples_per_triangle = 10.0;
  std::uint64_t seed = 0x5eed;
};

struct HausdorffRms {
  double a_to_b = 0.0;
  double b_to_a = 0.0;
  /// max(a_to_b, b_to_a)
  double symmetric = 0.0;
};

/// RMS of sampled point-to-surface distances, in both directions.
HausdorffRms hausdorff_rms(const TriMesh& a, const TriMesh& b, const HausdorffOptions& opts = {});

/// Directed RMS from samples on `from` to the surface of `to`.
double directed_rms(const TriMesh& from, const TriMesh& to, const HausdorffOptions& opts = {});

/// Per-vertex distance from each vertex of `from` to the surface of `to`.
std::vector<double> vertex_distances_to_surface(const TriMesh& from, const TriMesh& to);

}  // namespace fatpad
