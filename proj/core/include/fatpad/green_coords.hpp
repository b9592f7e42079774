#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "fatpad/cage.hpp"
#include "fatpad/mesh.hpp"

namespace fatpad {

using PositionMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using CoordinateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Green Coordinates of a set of mesh vertices with respect to a closed cage.
struct GCBinding {
  std::vector<VertexId> vertices;  // bound mesh vertices, sorted
  std::vector<VertexId> exterior;  // requested vertices left unbound (outside the cage)
  CoordinateMatrix phi;            // vertices × cage vertices
  CoordinateMatrix psi;            // vertices × cage triangles
  std::vector<Triangle> cage_triangles;
  std::size_t cage_vertex_count = 0;
  /// Rest edge vectors (v1 - v0, v2 - v0) and unit normal per cage triangle.
  std::vector<std::array<Vec3, 2>> rest_edges;
  std::vector<Vec3> rest_normals;
  std::uint64_t mesh_hash = 0;
  std::uint64_t cage_hash = 0;
  /// Faces whose plane passed within the singular tolerance of a vertex and
  /// were integrated at a slightly shifted point.
  std::size_t perturbed = 0;
};

struct BindOptions {
  /// Vertices to bind; empty means every mesh vertex.
  std::vector<VertexId> candidates;
  unsigned threads = 0;
};

/// Computes phi (vertex weights) and psi (face weights) in closed form.
/// Candidates with winding number below 1/2 are recorded as exterior and not
/// bound. Throws InvalidTopology for an open cage and OnBoundary when a vertex
/// lies on a cage face.
GCBinding bind(const TriMesh& mesh, const Cage& cage, const BindOptions& options = {});

/// Closed-form coordinates of a single point. `phi` has one entry per cage
/// vertex and `psi` one per cage triangle.
void green_coordinates(const std::vector<Vec3>& cage_vertices, const std::vector<Triangle>& cage_triangles,
                       const Vec3& point, Eigen::Ref<Eigen::VectorXd> phi, Eigen::Ref<Eigen::VectorXd> psi,
                       double singular_tolerance = 0.0, std::size_t* perturbed = nullptr);

/// Stretch factor of a cage triangle from its rest edges to deformed edges.
double face_stretch(const std::array<Vec3, 2>& rest, const Vec3& e1, const Vec3& e2);

struct EvaluateReport {
  std::vector<std::uint32_t> degenerate_faces;
};

/// Positions of the bound vertices under a deformed cage, one row each in
/// binding.vertices order. Throws TopologyMismatch when the vertex count
/// differs from bind time.
PositionMatrix evaluate(const GCBinding& binding, const std::vector<Vec3>& cage_vertices,
                        EvaluateReport* report = nullptr);

/// Binary cache: magic "FPGCB001", u64 mesh hash, u64 cage hash, u64 bound
/// count n, u64 cage vertex count, u64 cage triangle count, u64 exterior count,
/// u32[n] vertex ids, u32[] exterior ids, f64 phi row-major, f64 psi row-major.
std::vector<std::uint8_t> serialize_binding(const GCBinding& binding);
/// Rest face data is rebuilt from `cage`; hash mismatches raise StaleCache.
GCBinding deserialize_binding(const std::vector<std::uint8_t>& bytes, const TriMesh& mesh, const Cage& cage);

void save_binding_file(const GCBinding& binding, const std::filesystem::path& path);
GCBinding load_binding_file(const std::filesystem::path& path, const TriMesh& mesh, const Cage& cage);

}  // namespace fatpad
