#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fatpad/error.hpp"
#include "fatpad/posing.hpp"

namespace fatpad {

struct BuildOptions {
  CageParams cage;
  AttenuationParams attenuation;
  /// Geodesic cache directory; defaults to FATPAD_CACHE_DIR when unset.
  std::optional<std::filesystem::path> cache_dir;
  BindOptions bind;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Pipeline failure tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Stage names in pipeline order.
inline constexpr const char* kStages[] = {"fatpad-map", "geodesics", "attenuation", "cage-builder", "green-coords"};

/// Runs the offline pipeline. `on_stage` is called after each stage.
Rig build_rig(TriMesh mesh, std::string_view map_json, const BuildOptions& opts = {},
              const std::function<void(const StageTiming&)>& on_stage = {});

/// Artifact names inside a bundle directory.
struct BundleFiles {
  static constexpr const char* manifest = "bundle.json";
  static constexpr const char* mesh = "mesh.obj";
  static constexpr const char* map = "map.json";
  static constexpr const char* cage_upper = "cage_upper.json";
  static constexpr const char* cage_lower = "cage_lower.json";
  static constexpr const char* weights = "weights.json";
  static constexpr const char* binding_upper = "binding_upper.gcb";
  static constexpr const char* binding_lower = "binding_lower.gcb";
};

/// Writes every artifact plus the manifest. Output bytes depend only on the rig.
void write_bundle(const Rig& rig, const std::filesystem::path& dir);

/// Loads and cross-checks a bundle. Any missing file, hash disagreement or
/// invalid artifact raises before anything is returned.
std::shared_ptr<const Rig> load_bundle(const std::filesystem::path& dir);

}  // namespace fatpad
