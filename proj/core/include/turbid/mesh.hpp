#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "turbid/pose.hpp"

namespace turbid {

/// Triangle mesh whose faces double as the segments of the albedo map.
/// Per-face albedo is the simulation ground truth.
class TriMesh {
 public:
  TriMesh() = default;
  /// Throws DataError when an index is out of range, a face is degenerate
  /// (zero area) or an albedo lies outside [0, 1].
  TriMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces,
          std::vector<double> albedo);

  std::size_t face_count() const { return faces_.size(); }
  std::size_t vertex_count() const { return vertices_.size(); }
  bool empty() const { return faces_.empty(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const std::vector<double>& albedo() const { return albedo_; }
  const std::vector<double>& areas() const { return areas_; }
  const std::vector<Vec3>& normals() const { return normals_; }

  const Vec3& vertex(std::size_t face, int corner) const {
    return vertices_[static_cast<std::size_t>(faces_[face][corner])];
  }
  Vec3 centroid(std::size_t face) const;
  double area(std::size_t face) const { return areas_[face]; }
  const Vec3& normal(std::size_t face) const { return normals_[face]; }

  double total_area() const;
  Eigen::AlignedBox3d bounds() const;
  /// Length of the bounding-box diagonal.
  double diameter() const;

  void set_albedo(std::vector<double> albedo);

 private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<double> albedo_;
  std::vector<double> areas_;
  std::vector<Vec3> normals_;
};

}  // namespace turbid
