#pragma once

#include <filesystem>
#include <vector>

#include "turbid/mesh.hpp"

namespace turbid {

/// Reads the vertices and triangles of a Wavefront OBJ file. Texture and
/// normal indices are ignored. Faces with more than three corners are
/// rejected with a DataError naming the line.
TriMesh read_obj(const std::filesystem::path& path, std::vector<double> albedo = {});

/// Per-face albedo table: one value per line, or "face,albedo" rows.
/// Blank lines and lines starting with '#' are skipped.
std::vector<double> read_albedo_csv(const std::filesystem::path& path, std::size_t face_count);

void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

}  // namespace turbid
