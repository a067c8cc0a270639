#include "turbid/mesh.hpp"

#include <string>

#include "turbid/errors.hpp"

namespace turbid {

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces,
                 std::vector<double> albedo)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const auto nv = static_cast<int>(vertices_.size());
  areas_.reserve(faces_.size());
  normals_.reserve(faces_.size());
  for (std::size_t k = 0; k < faces_.size(); ++k) {
    for (int idx : faces_[k]) {
      if (idx < 0 || idx >= nv) {
        throw DataError("face " + std::to_string(k) + " references vertex " +
                        std::to_string(idx) + " out of range");
      }
    }
    const Vec3 n = (vertex(k, 1) - vertex(k, 0)).cross(vertex(k, 2) - vertex(k, 0));
    const double area = 0.5 * n.norm();
    if (!(area > 0.0)) {
      throw DataError("face " + std::to_string(k) + " has zero area");
    }
    areas_.push_back(area);
    normals_.push_back(n / (2.0 * area));
  }
  set_albedo(std::move(albedo));
}

void TriMesh::set_albedo(std::vector<double> albedo) {
  if (albedo.empty()) {
    albedo.assign(faces_.size(), 1.0);
  }
  if (albedo.size() != faces_.size()) {
    throw DataError("albedo table has " + std::to_string(albedo.size()) +
                    " entries for " + std::to_string(faces_.size()) + " faces");
  }
  for (std::size_t k = 0; k < albedo.size(); ++k) {
    if (!(albedo[k] >= 0.0 && albedo[k] <= 1.0)) {
      throw DataError("albedo of face " + std::to_string(k) + " outside [0, 1]");
    }
  }
  albedo_ = std::move(albedo);
}

Vec3 TriMesh::centroid(std::size_t face) const {
  return (vertex(face, 0) + vertex(face, 1) + vertex(face, 2)) / 3.0;
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (double a : areas_) sum += a;
  return sum;
}

Eigen::AlignedBox3d TriMesh::bounds() const {
  Eigen::AlignedBox3d box;
  for (const auto& v : vertices_) box.extend(v);
  return box;
}

double TriMesh::diameter() const {
  if (vertices_.empty()) return 0.0;
  return bounds().diagonal().norm();
}

}  // namespace turbid
