#include "fatpad/green_coords.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>

#include <spdlog/spdlog.h>

#include "binary_io.hpp"
#include "fatpad/error.hpp"
#include "fatpad/hash.hpp"
#include "fatpad/parallel.hpp"
#include "fatpad/spatial.hpp"

namespace fatpad {
namespace {

constexpr char kMagic[8] = {'F', 'P', 'G', 'C', 'B', '0', '0', '1'};

double safe_acos(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }

// Integral of 1/|x - eta| style kernel over triangle (p, v1, v2) in the plane
// at distance sqrt(c) from eta; closed form of the GC triangle integral.
double tri_int(const Vec3& p, const Vec3& v1, const Vec3& v2, const Vec3& eta) {
  const Vec3 a = v2 - v1, b = p - v1;
  const double la = a.norm(), lb = b.norm();
  const Vec3 d1 = v1 - p, d2 = v2 - p;
  const double l1 = d1.norm(), l2 = d2.norm();
  const double scale = std::max({la, l1, l2});
  if (lb <= 1e-14 * scale || l2 <= 1e-14 * scale || la <= 1e-14 * scale) return 0.0;
  const double alpha = safe_acos(a.dot(b) / (la * lb));
  const double beta = safe_acos(d1.dot(d2) / (l1 * l2));
  if (beta <= 1e-14 || alpha <= 1e-14 || alpha + beta >= kPi - 1e-14) return 0.0;
  const double sa = std::sin(alpha);
  const double lambda = lb * lb * sa * sa;
  const double c = (p - eta).squaredNorm();
  const double sqc = std::sqrt(c), sql = std::sqrt(lambda);
  auto integral = [&](double theta) {
    const double S = std::sin(theta), C = std::cos(theta);
    const double sign = S > 0 ? 1.0 : (S < 0 ? -1.0 : 0.0);
    const double t1 = 2.0 * sqc * std::atan(sqc * C / std::sqrt(lambda + S * S * c));
    const double inner = 1.0 - 2.0 * c * C / (c * (1.0 + C) + lambda + std::sqrt(lambda * lambda + lambda * c * S * S));
    const double t2 = sql * std::log(2.0 * sql * S * S / ((1.0 - C) * (1.0 - C)) * inner);
    return -0.5 * sign * (t1 + t2);
  };
  return -1.0 / (4.0 * kPi) * std::abs(integral(kPi - alpha) - integral(kPi - alpha - beta) - sqc * beta);
}

double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

void green_coordinates(const std::vector<Vec3>& cage_vertices, const std::vector<Triangle>& cage_triangles,
                       const Vec3& point, Eigen::Ref<Eigen::VectorXd> phi, Eigen::Ref<Eigen::VectorXd> psi,
                       double singular_tolerance, std::size_t* perturbed) {
  phi.setZero();
  psi.setZero();
  for (std::size_t j = 0; j < cage_triangles.size(); ++j) {
    const Triangle& t = cage_triangles[j];
    const Vec3& a = cage_vertices[t[0]];
    const Vec3& b = cage_vertices[t[1]];
    const Vec3& c = cage_vertices[t[2]];
    const Vec3 n = (b - a).cross(c - a).normalized();
    Vec3 eta = point;
    const double h = n.dot(a - eta);
    if (std::abs(h) <= singular_tolerance) {
      if ((closest_point_on_triangle(eta, a, b, c) - eta).norm() <= singular_tolerance) {
        throw Error(ErrorCode::OnBoundary, "point lies on a cage face");
      }
      // In the face plane but outside the face: integrate from just inside.
      eta -= 2.0 * singular_tolerance * n;
      if (perturbed != nullptr) ++*perturbed;
    }
    std::array<Vec3, 3> v = {a - eta, b - eta, c - eta};
    const Vec3 p = v[0].dot(n) * n;
    std::array<double, 3> s{}, I{}, II{};
    std::array<Vec3, 3> N;
    for (int l = 0; l < 3; ++l) {
      const Vec3& vl = v[l];
      const Vec3& vn = v[(l + 1) % 3];
      s[l] = sign_of((vl - p).cross(vn - p).dot(n));
      I[l] = tri_int(p, vl, vn, Vec3::Zero());
      II[l] = tri_int(Vec3::Zero(), vn, vl, Vec3::Zero());
      const Vec3 q = vn.cross(vl);
      N[l] = q.normalized();
    }
    const double Isum = -std::abs(s[0] * I[0] + s[1] * I[1] + s[2] * I[2]);
    psi[static_cast<Eigen::Index>(j)] = -Isum;
    const Vec3 w = n * Isum + N[0] * II[0] + N[1] * II[1] + N[2] * II[2];
    if (w.norm() > 1e-300) {
      for (int l = 0; l < 3; ++l) {
        const Vec3& Nn = N[(l + 1) % 3];
        phi[t[l]] += Nn.dot(w) / Nn.dot(v[l]);
      }
    }
  }
}

double face_stretch(const std::array<Vec3, 2>& rest, const Vec3& e1, const Vec3& e2) {
  const Vec3& u = rest[0];
  const Vec3& v = rest[1];
  const double area = 0.5 * u.cross(v).norm();
  const double num = e1.squaredNorm() * v.squaredNorm() - 2.0 * e1.dot(e2) * u.dot(v) + e2.squaredNorm() * u.squaredNorm();
  return std::sqrt(std::max(num, 0.0)) / (std::sqrt(8.0) * area);
}

GCBinding bind(const TriMesh& mesh, const Cage& cage, const BindOptions& options) {
  if (!is_closed_manifold(cage)) throw Error(ErrorCode::InvalidTopology, "Green Coordinates need a closed cage");
  GCBinding b;
  b.cage_triangles = cage.triangles;
  b.cage_vertex_count = cage.vertices.size();
  for (const Triangle& t : cage.triangles) {
    const Vec3 e1 = cage.vertices[t[1]] - cage.vertices[t[0]];
    const Vec3 e2 = cage.vertices[t[2]] - cage.vertices[t[0]];
    if (e1.cross(e2).norm() <= 0.0) throw Error(ErrorCode::InvalidTopology, "cage has a zero-area triangle");
    b.rest_edges.push_back({e1, e2});
    b.rest_normals.push_back(e1.cross(e2).normalized());
  }
  b.mesh_hash = parse_hex(content_hash(mesh));
  b.cage_hash = cage.hash();

  std::vector<VertexId> candidates = options.candidates;
  if (candidates.empty()) {
    candidates.resize(mesh.vertex_count());
    for (VertexId v = 0; v < candidates.size(); ++v) candidates[v] = v;
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  BoundingBox box;
  for (const Vec3& p : cage.vertices) box.extend(p);
  const double tol = 1e-8 * std::max(mesh.bbox_diagonal(), box.diagonal());
  std::vector<char> inside(candidates.size(), 0);
  parallel_for(
      candidates.size(),
      [&](std::size_t i) {
        const VertexId v = candidates[i];
        if (v >= mesh.vertex_count()) {
          throw Error(ErrorCode::InvalidArgument, fmt::format("vertex {} out of range", v));
        }
        const Vec3& p = mesh.position(v);
        for (const Triangle& t : cage.triangles) {
          const Vec3 q = closest_point_on_triangle(p, cage.vertices[t[0]], cage.vertices[t[1]], cage.vertices[t[2]]);
          if ((q - p).norm() <= tol) {
            throw Error(ErrorCode::OnBoundary, fmt::format("mesh vertex {} lies on a cage face", v));
          }
        }
        inside[i] = winding_number(cage, p) >= 0.5;
      },
      options.threads);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    (inside[i] ? b.vertices : b.exterior).push_back(candidates[i]);
  }

  const auto nv = static_cast<Eigen::Index>(cage.vertices.size());
  const auto nf = static_cast<Eigen::Index>(cage.triangles.size());
  b.phi.resize(static_cast<Eigen::Index>(b.vertices.size()), nv);
  b.psi.resize(static_cast<Eigen::Index>(b.vertices.size()), nf);
  std::atomic<std::size_t> perturbed = 0;
  parallel_for(
      b.vertices.size(),
      [&](std::size_t i) {
        Eigen::VectorXd phi(nv), psi(nf);
        std::size_t local = 0;
        green_coordinates(cage.vertices, cage.triangles, mesh.position(b.vertices[i]), phi, psi, tol, &local);
        b.phi.row(static_cast<Eigen::Index>(i)) = phi.transpose();
        b.psi.row(static_cast<Eigen::Index>(i)) = psi.transpose();
        perturbed += local;
      },
      options.threads);
  b.perturbed = perturbed;
  if (b.perturbed > 0) spdlog::info("green coordinates: {} near-planar face integrals perturbed", b.perturbed);
  return b;
}

PositionMatrix evaluate(const GCBinding& binding, const std::vector<Vec3>& cage_vertices, EvaluateReport* report) {
  if (cage_vertices.size() != binding.cage_vertex_count) {
    throw Error(ErrorCode::TopologyMismatch,
                fmt::format("cage has {} vertices, binding expects {}", cage_vertices.size(), binding.cage_vertex_count));
  }
  const auto nv = static_cast<Eigen::Index>(cage_vertices.size());
  const auto nf = static_cast<Eigen::Index>(binding.cage_triangles.size());
  PositionMatrix C(nv, 3);
  for (Eigen::Index i = 0; i < nv; ++i) C.row(i) = cage_vertices[static_cast<std::size_t>(i)].transpose();
  PositionMatrix SN(nf, 3);
  for (Eigen::Index j = 0; j < nf; ++j) {
    const Triangle& t = binding.cage_triangles[static_cast<std::size_t>(j)];
    const Vec3 e1 = cage_vertices[t[1]] - cage_vertices[t[0]];
    const Vec3 e2 = cage_vertices[t[2]] - cage_vertices[t[0]];
    const auto& rest = binding.rest_edges[static_cast<std::size_t>(j)];
    const Vec3 cr = e1.cross(e2);
    Vec3 n;
    if (cr.norm() <= 1e-12 * rest[0].cross(rest[1]).norm()) {
      n = binding.rest_normals[static_cast<std::size_t>(j)];
      if (report != nullptr) report->degenerate_faces.push_back(static_cast<std::uint32_t>(j));
    } else {
      n = cr.normalized();
    }
    SN.row(j) = face_stretch(rest, e1, e2) * n.transpose();
  }
  PositionMatrix out = binding.phi * C;
  out.noalias() += binding.psi * SN;
  return out;
}

std::vector<std::uint8_t> serialize_binding(const GCBinding& b) {
  detail::ByteWriter w;
  for (char c : kMagic) w.put(c);
  w.put<std::uint64_t>(b.mesh_hash);
  w.put<std::uint64_t>(b.cage_hash);
  w.put<std::uint64_t>(b.vertices.size());
  w.put<std::uint64_t>(b.cage_vertex_count);
  w.put<std::uint64_t>(b.cage_triangles.size());
  w.put<std::uint64_t>(b.exterior.size());
  for (VertexId v : b.vertices) w.put<std::uint32_t>(v);
  for (VertexId v : b.exterior) w.put<std::uint32_t>(v);
  for (Eigen::Index i = 0; i < b.phi.size(); ++i) w.put<double>(b.phi.data()[i]);
  for (Eigen::Index i = 0; i < b.psi.size(); ++i) w.put<double>(b.psi.data()[i]);
  return std::move(w.out);
}

GCBinding deserialize_binding(const std::vector<std::uint8_t>& bytes, const TriMesh& mesh, const Cage& cage) {
  detail::ByteReader r(bytes, "binding cache");
  for (char c : kMagic) {
    if (r.get<char>() != c) throw Error(ErrorCode::CorruptStream, "not a binding cache");
  }
  GCBinding b;
  b.mesh_hash = r.get<std::uint64_t>();
  b.cage_hash = r.get<std::uint64_t>();
  if (b.mesh_hash != parse_hex(content_hash(mesh))) throw Error(ErrorCode::StaleCache, "binding belongs to another mesh");
  if (b.cage_hash != cage.hash()) throw Error(ErrorCode::StaleCache, "binding belongs to another cage");
  const auto n = r.get<std::uint64_t>();
  const auto nv = r.get<std::uint64_t>();
  const auto nf = r.get<std::uint64_t>();
  const auto ne = r.get<std::uint64_t>();
  if (nv != cage.vertices.size() || nf != cage.triangles.size()) {
    throw Error(ErrorCode::CorruptStream, "binding cage dimensions disagree with the cage");
  }
  r.require(n + ne, sizeof(std::uint32_t));
  for (std::uint64_t i = 0; i < n; ++i) b.vertices.push_back(r.get<std::uint32_t>());
  for (std::uint64_t i = 0; i < ne; ++i) b.exterior.push_back(r.get<std::uint32_t>());
  for (VertexId v : b.vertices) {
    if (v >= mesh.vertex_count()) throw Error(ErrorCode::CorruptStream, "binding vertex out of range");
  }
  r.require(n * (nv + nf), sizeof(double));
  b.phi.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nv));
  b.psi.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nf));
  for (Eigen::Index i = 0; i < b.phi.size(); ++i) b.phi.data()[i] = r.get<double>();
  for (Eigen::Index i = 0; i < b.psi.size(); ++i) b.psi.data()[i] = r.get<double>();
  if (!r.at_end()) throw Error(ErrorCode::CorruptStream, "trailing bytes in binding cache");
  b.cage_triangles = cage.triangles;
  b.cage_vertex_count = cage.vertices.size();
  for (const Triangle& t : cage.triangles) {
    const Vec3 e1 = cage.vertices[t[1]] - cage.vertices[t[0]];
    const Vec3 e2 = cage.vertices[t[2]] - cage.vertices[t[0]];
    b.rest_edges.push_back({e1, e2});
    b.rest_normals.push_back(e1.cross(e2).normalized());
  }
  return b;
}

void save_binding_file(const GCBinding& binding, const std::filesystem::path& path) {
  const auto bytes = serialize_binding(binding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

GCBinding load_binding_file(const std::filesystem::path& path, const TriMesh& mesh, const Cage& cage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_binding(bytes, mesh, cage);
}

}  // namespace fatpad
