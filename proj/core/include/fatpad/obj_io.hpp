#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fatpad/mesh.hpp"

namespace fatpad {

/// Parses Wavefront OBJ text. Only "v" and "f" records are used; polygons are
/// fan-triangulated from their first corner and vertex order is preserved.
/// Texture, normal, group and material records are ignored.
TriMesh load_obj(std::string_view text);
TriMesh load_obj_file(const std::filesystem::path& path);

/// Writes "v" and "f" records with shortest round-trip float formatting.
std::string save_obj(const TriMesh& mesh);
void save_obj_file(const TriMesh& mesh, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace fatpad
