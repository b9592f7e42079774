#include "fatpad/geodesic_cache.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>

#include "fatpad/hash.hpp"
#include "binary_io.hpp"
#include "geodesic_internal.hpp"

namespace fatpad {
namespace {

constexpr char kMagic[8] = {'F', 'P', 'G', 'E', 'O', '0', '0', '1'};

using detail::ByteReader;
using detail::ByteWriter;

}  // namespace

std::uint64_t mesh_content_key(const GeodesicSolver& solver) {
  return parse_hex(content_hash(solver.mesh()));
}

std::vector<std::uint8_t> serialize_field(const GeodesicField& field, const GeodesicSolver& solver) {
  const detail::FieldEvaluator* eval = detail::FieldAccess::evaluator(field);
  if (eval == nullptr || field.source() == kInvalidIndex) {
    throw Error(ErrorCode::InvalidArgument, "only vertex-source fields with point data can be serialized");
  }
  ByteWriter w;
  for (char c : kMagic) w.put(c);
  w.put<std::uint64_t>(mesh_content_key(solver));
  w.put<std::uint32_t>(field.source());
  w.put<std::uint32_t>(field.method() == GeodesicMethod::Exact ? 0u : 1u);
  std::uint32_t refinement = 0;
  const auto* dij = detail::dijkstra_data(*eval);
  if (dij != nullptr) refinement = static_cast<std::uint32_t>(dij->refinement);
  w.put<std::uint32_t>(refinement);
  w.put<std::uint32_t>(0);
  w.put<std::uint64_t>(field.distances().size());
  for (double d : field.distances()) w.put(d);
  if (const auto* ex = detail::exact_data(*eval)) {
    w.put<std::uint64_t>(ex->windows.size());
    for (const detail::StoredWindow& sw : ex->windows) {
      w.put<std::uint32_t>(sw.edge);
      w.put<std::uint32_t>(sw.towards);
      w.put(sw.b0);
      w.put(sw.b1);
      w.put(sw.sx);
      w.put(sw.sy);
      w.put(sw.d);
    }
  } else {
    w.put<std::uint64_t>(dij->edge_node_dist.size());
    for (double d : dij->edge_node_dist) w.put(d);
  }
  return std::move(w.out);
}

GeodesicField deserialize_field(const std::vector<std::uint8_t>& bytes, const GeodesicSolver& solver) {
  ByteReader r(bytes, "geodesic record");
  for (char c : kMagic) {
    if (r.get<char>() != c) throw Error(ErrorCode::CorruptStream, "not a geodesic record");
  }
  if (r.get<std::uint64_t>() != mesh_content_key(solver)) {
    throw Error(ErrorCode::StaleCache, "geodesic record belongs to a different mesh");
  }
  const auto& ctx = solver.context();
  const auto source = r.get<std::uint32_t>();
  const auto method = r.get<std::uint32_t>();
  const auto refinement = r.get<std::uint32_t>();
  r.get<std::uint32_t>();
  const auto n = r.get<std::uint64_t>();
  if (n != ctx->mesh.vertex_count() || source >= n || method > 1) {
    throw Error(ErrorCode::CorruptStream, "geodesic record header is inconsistent");
  }
  std::vector<double> dist(n);
  for (double& d : dist) d = r.get<double>();
  const auto m = r.get<std::uint64_t>();
  std::shared_ptr<const detail::FieldEvaluator> eval;
  const std::size_t edges = ctx->topo.edges().size();
  if (method == 0) {
    detail::ExactResult ex;
    ex.vertex_dist = dist;
    if (m > (bytes.size() - r.pos) / 48) throw Error(ErrorCode::CorruptStream, "geodesic record truncated");
    ex.windows.resize(m);
    for (auto& sw : ex.windows) {
      sw.edge = r.get<std::uint32_t>();
      sw.towards = r.get<std::uint32_t>();
      sw.b0 = r.get<double>();
      sw.b1 = r.get<double>();
      sw.sx = r.get<double>();
      sw.sy = r.get<double>();
      sw.d = r.get<double>();
      if (sw.edge >= edges) throw Error(ErrorCode::CorruptStream, "window edge out of range");
    }
    ex.edge_offset.assign(edges + 1, 0);
    for (std::size_t k = 0; k < ex.windows.size(); ++k) {
      if (k > 0 && ex.windows[k].edge < ex.windows[k - 1].edge) {
        throw Error(ErrorCode::CorruptStream, "windows not grouped by edge");
      }
      ++ex.edge_offset[ex.windows[k].edge + 1];
    }
    for (std::size_t e = 0; e < edges; ++e) ex.edge_offset[e + 1] += ex.edge_offset[e];
    eval = detail::make_exact_evaluator(ctx, std::move(ex));
  } else {
    detail::DijkstraResult dj;
    dj.refinement = static_cast<int>(refinement);
    dj.vertex_dist = dist;
    if (m != edges * refinement) throw Error(ErrorCode::CorruptStream, "edge point count mismatch");
    dj.edge_node_dist.resize(m);
    for (double& d : dj.edge_node_dist) d = r.get<double>();
    eval = detail::make_dijkstra_evaluator(ctx, std::move(dj));
  }
  if (r.pos != bytes.size()) throw Error(ErrorCode::CorruptStream, "trailing bytes in geodesic record");
  return detail::FieldAccess::make(source, method == 0 ? GeodesicMethod::Exact : GeodesicMethod::RefinedDijkstra,
                                   std::move(dist), std::move(eval));
}

GeodesicCache::GeodesicCache(std::optional<std::filesystem::path> directory)
    : directory_(std::move(directory)) {}

std::optional<std::filesystem::path> GeodesicCache::directory_from_env() {
  const char* dir = std::getenv("FATPAD_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return std::filesystem::path(dir);
}

std::filesystem::path GeodesicCache::file_for(const Key& key) const {
  const auto& [hash, source, method, refinement] = key;
  return *directory_ / (to_hex(hash) + "_" + std::to_string(method) + "_" + std::to_string(refinement) + "_" +
                        std::to_string(source) + ".fpgeo");
}

GeodesicField GeodesicCache::get_or_solve(const GeodesicSolver& solver, VertexId source,
                                          const GeodesicOptions& opts) {
  if (opts.max_distance < kInfinity) return solver.solve_from(source, opts);
  const int refinement = opts.method == GeodesicMethod::Exact ? 0 : opts.refinement;
  const Key key{mesh_content_key(solver), source, static_cast<int>(opts.method), refinement};
  {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  std::optional<GeodesicField> field;
  if (directory_) {
    std::ifstream in(file_for(key), std::ios::binary);
    if (in) {
      std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      try {
        field = deserialize_field(bytes, solver);
      } catch (const Error&) {
        field.reset();  // unreadable records are recomputed and overwritten
      }
    }
  }
  const bool from_disk = field.has_value();
  if (!field) field = solver.solve_from(source, opts);
  if (directory_ && !from_disk) {
    std::error_code ec;
    std::filesystem::create_directories(*directory_, ec);
    const auto path = file_for(key);
    const auto tmp = path.string() + ".tmp";
    const auto bytes = serialize_field(*field, solver);
    {
      std::ofstream out(tmp, std::ios::binary);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, path, ec);
  }
  std::unique_lock lock(mutex_);
  if (from_disk) ++hits_;
  return entries_.emplace(key, std::move(*field)).first->second;
}

std::size_t GeodesicCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::size_t GeodesicCache::hits() const { return hits_; }

void GeodesicCache::clear() {
  std::unique_lock lock(mutex_);
  entries_.clear();
  hits_ = 0;
}

}  // namespace fatpad
