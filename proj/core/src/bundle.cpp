#include "fatpad/bundle.hpp"

#include <chrono>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fatpad/geodesic_cache.hpp"
#include "fatpad/hash.hpp"
#include "fatpad/obj_io.hpp"

namespace fatpad {

namespace fs = std::filesystem;
using nlohmann::json;

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), fmt::format("stage {} failed: {}", stage, cause.detail())), stage_(std::move(stage)) {}

namespace {

template <typename F>
auto run_stage(const char* stage, const std::function<void(const StageTiming&)>& on_stage, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (on_stage) on_stage({stage, s});
    } else {
      auto result = body();
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (on_stage) on_stage({stage, s});
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const std::exception& e) {
    throw StageError(stage, Error(ErrorCode::Validation, e.what()));
  }
}

std::string cage_hash_hex(const Cage& c) { return to_hex(c.hash()); }

}  // namespace

Rig build_rig(TriMesh mesh, std::string_view map_json, const BuildOptions& opts,
              const std::function<void(const StageTiming&)>& on_stage) {
  Rig rig;
  rig.mesh = std::move(mesh);
  rig.map = run_stage("fatpad-map", on_stage, [&] { return load_map(map_json, rig.mesh); });

  auto cache = std::make_shared<GeodesicCache>(opts.cache_dir ? opts.cache_dir : GeodesicCache::directory_from_env());
  std::unique_ptr<AttenuationEngine> engine;
  run_stage("geodesics", on_stage, [&] {
    engine = std::make_unique<AttenuationEngine>(rig.mesh, rig.map, opts.attenuation, cache);
    for (const Handle& h : rig.map.handles()) engine->handle_field(h);
  });
  rig.weights = run_stage("attenuation", on_stage, [&] {
    WeightReport report;
    auto w = build_all_weight_matrices(*engine, rig.map, &report);
    if (!report.unresolved.empty()) {
      spdlog::warn("{} handle/vertex pairs had no border intersection", report.unresolved.size());
    }
    return w;
  });
  engine.reset();

  rig.cages = run_stage("cage-builder", on_stage, [&] { return build_both_cages(rig.mesh, rig.map, opts.cage); });
  run_stage("green-coords", on_stage, [&] {
    for (Region r : {Region::Upper, Region::Lower}) {
      BindOptions bo = opts.bind;
      if (bo.candidates.empty()) bo.candidates = region_vertices(rig.map, r);
      GCBinding b = bind(rig.mesh, rig.cages[r], bo);
      if (!b.exterior.empty()) {
        throw Error(ErrorCode::ConstructionFailure,
                    fmt::format("{} pad vertices lie outside the {} cage", b.exterior.size(), to_string(r)));
      }
      (r == Region::Upper ? rig.upper_binding : rig.lower_binding) = std::move(b);
    }
    validate_rig(rig);
  });
  return rig;
}

void write_bundle(const Rig& rig, const fs::path& dir) {
  fs::create_directories(dir);
  write_text_file(dir / BundleFiles::mesh, save_obj(rig.mesh));
  write_text_file(dir / BundleFiles::map, save_map(rig.map));
  save_cage_file(rig.cages.upper, dir / BundleFiles::cage_upper);
  save_cage_file(rig.cages.lower, dir / BundleFiles::cage_lower);
  write_text_file(dir / BundleFiles::weights, save_weights(rig.weights, rig.mesh, rig.map));
  save_binding_file(rig.upper_binding, dir / BundleFiles::binding_upper);
  save_binding_file(rig.lower_binding, dir / BundleFiles::binding_lower);

  auto cage_entry = [](const Cage& c, const char* file, const char* binding) {
    return json{{"file", file}, {"hash", cage_hash_hex(c)}, {"binding", binding}};
  };
  const json manifest = {
      {"format", "fatpad.bundle.v1"},
      {"mesh", {{"file", BundleFiles::mesh}, {"content_hash", content_hash(rig.mesh)},
                {"topology", topology_fingerprint(rig.mesh)}}},
      {"map", {{"file", BundleFiles::map}, {"hash", rig.map.hash()}}},
      {"weights", {{"file", BundleFiles::weights}}},
      {"cages", {{"upper", cage_entry(rig.cages.upper, BundleFiles::cage_upper, BundleFiles::binding_upper)},
                 {"lower", cage_entry(rig.cages.lower, BundleFiles::cage_lower, BundleFiles::binding_lower)}}},
  };
  write_text_file(dir / BundleFiles::manifest, manifest.dump(1) + "\n");
}

std::shared_ptr<const Rig> load_bundle(const fs::path& dir) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::Validation, "bundle: " + msg); };
  json manifest;
  try {
    manifest = json::parse(read_text_file(dir / BundleFiles::manifest));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("bundle manifest: {}", e.what()));
  }
  if (manifest.value("format", "") != "fatpad.bundle.v1") fail("unknown manifest format");

  auto rig = std::make_shared<Rig>();
  try {
    const json& m = manifest.at("mesh");
    rig->mesh = load_obj_file(dir / m.at("file").get<std::string>());
    if (content_hash(rig->mesh) != m.at("content_hash").get<std::string>()) fail("mesh content hash mismatch");

    const json& mp = manifest.at("map");
    rig->map = load_map_file(dir / mp.at("file").get<std::string>(), rig->mesh);
    if (rig->map.hash() != mp.at("hash").get<std::string>()) fail("pad map hash mismatch");

    for (Region r : {Region::Upper, Region::Lower}) {
      const json& c = manifest.at("cages").at(to_string(r));
      Cage cage = load_cage_file(dir / c.at("file").get<std::string>());
      if (cage.region != r) fail(fmt::format("{} cage file holds a {} cage", to_string(r), to_string(cage.region)));
      if (cage_hash_hex(cage) != c.at("hash").get<std::string>()) fail(fmt::format("{} cage hash mismatch", to_string(r)));
      GCBinding b = load_binding_file(dir / c.at("binding").get<std::string>(), rig->mesh, cage);
      (r == Region::Upper ? rig->cages.upper : rig->cages.lower) = std::move(cage);
      (r == Region::Upper ? rig->upper_binding : rig->lower_binding) = std::move(b);
    }
    rig->weights = load_weights(read_text_file(dir / manifest.at("weights").at("file").get<std::string>()),
                                rig->mesh, rig->map);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("bundle manifest: {}", e.what()));
  }
  validate_rig(*rig);
  return rig;
}

}  // namespace fatpad
