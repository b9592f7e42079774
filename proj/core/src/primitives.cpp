#include "fatpad/primitives.hpp"

#include <cmath>
#include <map>

#include "fatpad/error.hpp"

namespace fatpad {

TriMesh make_icosphere(int level, double radius, const Vec3& center) {
  if (level < 0) throw Error(ErrorCode::InvalidArgument, "icosphere level must be non-negative");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> p = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& v : p) v.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<VertexId, VertexId>, VertexId> mid;
    auto midpoint = [&](VertexId a, VertexId b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const auto id = static_cast<VertexId>(p.size());
      p.push_back((p[a] + p[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(f.size() * 4);
    for (const Triangle& tri : f) {
      const VertexId a = midpoint(tri[0], tri[1]);
      const VertexId b = midpoint(tri[1], tri[2]);
      const VertexId c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (Vec3& v : p) v = center + radius * v;
  return TriMesh(std::move(p), std::move(f));
}

TriMesh make_uv_sphere(int rings, int segments, double radius, const Vec3& center) {
  if (rings < 2 || segments < 3) throw Error(ErrorCode::InvalidArgument, "uv sphere too coarse");
  std::vector<Vec3> p;
  p.push_back(center + Vec3(0, radius, 0));
  for (int r = 1; r < rings; ++r) {
    const double theta = kPi * r / rings;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * kPi * s / segments;
      p.push_back(center + radius * Vec3(std::sin(theta) * std::sin(phi), std::cos(theta),
                                         std::sin(theta) * std::cos(phi)));
    }
  }
  p.push_back(center + Vec3(0, -radius, 0));
  const auto bottom = static_cast<VertexId>(p.size() - 1);
  auto ring = [&](int r, int s) { return static_cast<VertexId>(1 + (r - 1) * segments + (s % segments)); };
  std::vector<Triangle> f;
  for (int s = 0; s < segments; ++s) f.push_back({0, ring(1, s), ring(1, s + 1)});
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      f.push_back({ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)});
      f.push_back({ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)});
    }
  }
  for (int s = 0; s < segments; ++s) f.push_back({bottom, ring(rings - 1, s + 1), ring(rings - 1, s)});
  return TriMesh(std::move(p), std::move(f));
}

TriMesh make_grid(int nx, int ny, double sx, double sy) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one cell");
  std::vector<Vec3> p;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) p.emplace_back(sx * i / nx, sy * j / ny, 0.0);
  }
  auto id = [&](int i, int j) { return static_cast<VertexId>(j * (nx + 1) + i); };
  std::vector<Triangle> f;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if ((i + j) % 2 == 0) {
        f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      } else {
        f.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        f.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    }
  }
  return TriMesh(std::move(p), std::move(f));
}

TriMesh make_disc(int rings, int segments, double radius) {
  if (rings < 1 || segments < 3) throw Error(ErrorCode::InvalidArgument, "disc too coarse");
  std::vector<Vec3> p = {Vec3::Zero()};
  for (int r = 1; r <= rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * kPi * s / segments;
      p.emplace_back(radius * r / rings * std::cos(phi), radius * r / rings * std::sin(phi), 0.0);
    }
  }
  auto ring = [&](int r, int s) { return static_cast<VertexId>(1 + (r - 1) * segments + (s % segments)); };
  std::vector<Triangle> f;
  for (int s = 0; s < segments; ++s) f.push_back({0, ring(1, s), ring(1, s + 1)});
  for (int r = 1; r < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      f.push_back({ring(r, s), ring(r + 1, s), ring(r + 1, s + 1)});
      f.push_back({ring(r, s), ring(r + 1, s + 1), ring(r, s + 1)});
    }
  }
  return TriMesh(std::move(p), std::move(f));
}

namespace {

std::vector<Vec3> box_corners(const Vec3& lo, const Vec3& hi) {
  std::vector<Vec3> p;
  for (int i = 0; i < 8; ++i) {
    p.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  }
  return p;
}

// Quads as corner indices, counter-clockwise seen from outside.
constexpr int kBoxQuads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                 {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};

}  // namespace

TriMesh make_box(const Vec3& min, const Vec3& max) {
  std::vector<Vec3> p = box_corners(min, max);
  std::vector<Triangle> f;
  for (const auto& q : kBoxQuads) {
    f.push_back({VertexId(q[0]), VertexId(q[1]), VertexId(q[2])});
    f.push_back({VertexId(q[0]), VertexId(q[2]), VertexId(q[3])});
  }
  return TriMesh(std::move(p), std::move(f));
}

TriMesh make_tetrakis_box(const Vec3& min, const Vec3& max) {
  std::vector<Vec3> p = box_corners(min, max);
  std::vector<Triangle> f;
  for (const auto& q : kBoxQuads) {
    const auto c = static_cast<VertexId>(p.size());
    p.push_back(0.25 * (p[q[0]] + p[q[1]] + p[q[2]] + p[q[3]]));
    for (int k = 0; k < 4; ++k) f.push_back({VertexId(q[k]), VertexId(q[(k + 1) % 4]), c});
  }
  return TriMesh(std::move(p), std::move(f));
}

}  // namespace fatpad
