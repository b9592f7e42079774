#pragma once

#include "fatpad/mesh.hpp"

namespace fatpad {

/// Subdivided icosahedron projected onto a sphere; 10 * 4^level + 2 vertices.
TriMesh make_icosphere(int level, double radius = 1.0, const Vec3& center = Vec3::Zero());

/// Latitude/longitude sphere with poles; rings >= 2, segments >= 3.
TriMesh make_uv_sphere(int rings, int segments, double radius = 1.0, const Vec3& center = Vec3::Zero());

/// Flat grid in the z = 0 plane over [0, sx] x [0, sy] with nx * ny quads,
/// each split along alternating diagonals.
TriMesh make_grid(int nx, int ny, double sx, double sy);

/// Flat disc in the z = 0 plane: a center vertex and `rings` concentric rings
/// of `segments` vertices.
TriMesh make_disc(int rings, int segments, double radius);

/// Axis-aligned box with 12 outward-facing triangles.
TriMesh make_box(const Vec3& min, const Vec3& max);

/// Box whose faces are split into four triangles around a face-center vertex.
TriMesh make_tetrakis_box(const Vec3& min, const Vec3& max);

}  // namespace fatpad
