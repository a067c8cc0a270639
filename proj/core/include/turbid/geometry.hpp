#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "turbid/bvh.hpp"
#include "turbid/camera.hpp"
#include "turbid/mesh.hpp"

namespace turbid {

/// A mesh together with its acceleration structure. Immutable after
/// construction and shared between concurrent evaluations.
class Surface {
 public:
  explicit Surface(TriMesh mesh);
  Surface(const Surface&) = delete;
  Surface& operator=(const Surface&) = delete;

  const TriMesh& mesh() const { return mesh_; }
  const Bvh& bvh() const { return bvh_; }
  /// Shadow-ray offset, 1e-4 of the scene diameter.
  double epsilon() const { return epsilon_; }

  /// Height of the highest surface point above (x, y), if any.
  std::optional<double> height_at(double x, double y) const;

 private:
  TriMesh mesh_;
  Bvh bvh_;
  double epsilon_;
};

/// Pixel <-> face correspondence for one camera pose.
///
/// `hit_face` is the nearest surface along each pixel ray regardless of
/// orientation. `face` is the observing face: the hit face when it is front
/// facing, otherwise -1. Face pixel sets are built from `face` only, so a
/// back-facing or occluded face has an empty set.
class ProjectionMap {
 public:
  ProjectionMap() = default;
  ProjectionMap(int width, int height, std::size_t face_count);

  int width() const { return width_; }
  int height() const { return height_; }
  int pixel_count() const { return width_ * height_; }
  std::size_t face_count() const { return face_offsets_.empty() ? 0 : face_offsets_.size() - 1; }

  int hit_face(int pixel) const { return hit_face_[pixel]; }
  int face(int pixel) const { return face_[pixel]; }
  /// Distance from the camera center to the hit along the ray (+inf for
  /// rays that leave the scene).
  double depth(int pixel) const { return depth_[pixel]; }
  const Vec3& point(int pixel) const { return point_[pixel]; }
  const Vec3& ray(int pixel) const { return ray_[pixel]; }

  std::span<const int> pixels_of(std::size_t face) const;
  int pixel_count_of(std::size_t face) const;
  bool visible(std::size_t face) const { return pixel_count_of(face) > 0; }
  /// Pixels not observing any face (background or back-facing hits).
  int background_count() const;

 private:
  friend ProjectionMap project(const Surface&, const Pose&, const CameraModel&);

  int width_ = 0;
  int height_ = 0;
  std::vector<int> hit_face_;
  std::vector<int> face_;
  std::vector<double> depth_;
  std::vector<Vec3> point_;
  std::vector<Vec3> ray_;
  std::vector<int> face_offsets_;
  std::vector<int> face_pixels_;
};

/// Ray-cast every pixel through the surface. Throws DataError for an empty
/// mesh or a non-finite pose.
ProjectionMap project(const Surface& surface, const Pose& camera,
                      const CameraModel& model);

/// True iff `point` lies inside the light cone and the segment from the
/// light to the point (offset by epsilon along the normal, towards the
/// light) crosses no face. A half-angle >= pi disables the cone test.
bool light_visibility(const Surface& surface, const Pose& light,
                      double cone_half_angle, const Vec3& point,
                      const Vec3& normal);

bool inside_cone(const Pose& light, double cos_half_angle, const Vec3& point);

/// Effective resolution |T_k(t)| / |T_k| in pixels per square meter, or
/// nullopt when the face is not observed in this projection.
std::optional<double> segment_resolution(const ProjectionMap& map,
                                         const TriMesh& mesh, std::size_t face);

}  // namespace turbid
