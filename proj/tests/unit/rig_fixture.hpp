#pragma once

#include <memory>

#include "fatpad/bundle.hpp"
#include "fixtures.hpp"

namespace fixtures {

/// Rig over SphereFace, built once per test binary.
inline std::shared_ptr<const fatpad::Rig> sphere_rig() {
  static const std::shared_ptr<const fatpad::Rig> rig = [] {
    const SphereFace scene;
    return std::make_shared<const fatpad::Rig>(fatpad::build_rig(scene.mesh, fatpad::save_map(scene.map)));
  }();
  return rig;
}

}  // namespace fixtures
