#pragma once

#include <string>

#include "fatpad/mesh.hpp"

namespace fatpad {

/// Procedural head of 10242 vertices, y up and facing +z. Sampling is
/// denser towards the face.
TriMesh make_demo_head();

/// Pad map for make_demo_head() as JSON text: 11 upper pads (forehead, brows,
/// cheeks, nose, upper lip, lip corners) and 4 lower pads (lower lip, chin,
/// jaw), one handle each. The lips carry movable borders along the mouth.
std::string make_demo_map(const TriMesh& head);

}  // namespace fatpad
