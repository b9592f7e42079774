#include "fatpad/topology.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace fatpad {

MeshTopology::MeshTopology(const TriMesh& mesh) : vertex_count_(mesh.vertex_count()) {
  const auto& tris = mesh.triangles();
  const auto n = vertex_count_;

  struct HalfRef {
    VertexId a, b;
    TriangleId tri;
    int corner;
  };
  std::vector<HalfRef> halves;
  halves.reserve(tris.size() * 3);
  for (TriangleId t = 0; t < tris.size(); ++t)
    for (int k = 0; k < 3; ++k) {
      VertexId a = tris[t][k], b = tris[t][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      halves.push_back({a, b, t, k});
    }
  std::sort(halves.begin(), halves.end(), [](const HalfRef& x, const HalfRef& y) {
    return std::tie(x.a, x.b, x.tri, x.corner) < std::tie(y.a, y.b, y.tri, y.corner);
  });

  tri_edges_.assign(tris.size(), {kInvalidIndex, kInvalidIndex, kInvalidIndex});
  for (std::size_t i = 0; i < halves.size();) {
    std::size_t j = i;
    while (j < halves.size() && halves[j].a == halves[i].a && halves[j].b == halves[i].b) ++j;
    Edge e;
    e.v0 = halves[i].a;
    e.v1 = halves[i].b;
    const auto id = static_cast<EdgeId>(edges_.size());
    if (j - i > 2) nonmanifold_.push_back(id);
    for (std::size_t k = i; k < j; ++k) {
      if (k - i < 2) e.faces[k - i] = halves[k].tri;
      tri_edges_[halves[k].tri][halves[k].corner] = id;
    }
    edges_.push_back(e);
    i = j;
  }

  std::vector<std::uint32_t> degree(n, 0);
  for (const auto& e : edges_) {
    ++degree[e.v0];
    ++degree[e.v1];
  }
  nbr_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) nbr_offset_[v + 1] = nbr_offset_[v] + degree[v];
  nbr_.resize(nbr_offset_[n]);
  nbr_edge_.resize(nbr_offset_[n]);
  std::vector<std::uint32_t> fill(nbr_offset_.begin(), nbr_offset_.end() - 1);
  // Edges are sorted by (v0, v1), so each neighbor list comes out sorted
  // except for the interleaving of lower and higher neighbors; sort after.
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const auto& e = edges_[id];
    nbr_[fill[e.v0]] = e.v1;
    nbr_edge_[fill[e.v0]++] = id;
    nbr_[fill[e.v1]] = e.v0;
    nbr_edge_[fill[e.v1]++] = id;
  }
  for (std::size_t v = 0; v < n; ++v) {
    const auto b = nbr_offset_[v], en = nbr_offset_[v + 1];
    std::vector<std::pair<VertexId, EdgeId>> tmp;
    tmp.reserve(en - b);
    for (auto k = b; k < en; ++k) tmp.emplace_back(nbr_[k], nbr_edge_[k]);
    std::sort(tmp.begin(), tmp.end());
    for (auto k = b; k < en; ++k) {
      nbr_[k] = tmp[k - b].first;
      nbr_edge_[k] = tmp[k - b].second;
    }
  }

  std::vector<std::uint32_t> tdeg(n, 0);
  for (const auto& tri : tris)
    for (VertexId v : tri) ++tdeg[v];
  vtri_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) vtri_offset_[v + 1] = vtri_offset_[v] + tdeg[v];
  vtri_.resize(vtri_offset_[n]);
  std::vector<std::uint32_t> tfill(vtri_offset_.begin(), vtri_offset_.end() - 1);
  for (TriangleId t = 0; t < tris.size(); ++t)
    for (VertexId v : tris[t]) vtri_[tfill[v]++] = t;

  boundary_vertex_.assign(n, false);
  for (const auto& e : edges_)
    if (e.boundary()) boundary_vertex_[e.v0] = boundary_vertex_[e.v1] = true;
}

EdgeId MeshTopology::find_edge(VertexId a, VertexId b) const {
  if (a >= vertex_count_ || b >= vertex_count_) return kInvalidIndex;
  const auto nb = neighbors(a);
  const auto it = std::lower_bound(nb.begin(), nb.end(), b);
  if (it == nb.end() || *it != b) return kInvalidIndex;
  return nbr_edge_[nbr_offset_[a] + static_cast<std::uint32_t>(it - nb.begin())];
}

std::vector<std::uint32_t> MeshTopology::components() const {
  std::vector<std::uint32_t> label(vertex_count_, kInvalidIndex);
  std::uint32_t next = 0;
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < vertex_count_; ++s) {
    if (label[s] != kInvalidIndex) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (VertexId u : neighbors(v))
        if (label[u] == kInvalidIndex) {
          label[u] = next;
          stack.push_back(u);
        }
    }
    ++next;
  }
  return label;
}

}  // namespace fatpad
