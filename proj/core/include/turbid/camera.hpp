#pragma once

#include <optional>

#include "turbid/pose.hpp"

namespace turbid {

/// Pinhole intrinsics plus the sensor noise parameters. Pixel (i, j) covers
/// the continuous square [i, i+1) x [j, j+1); its ray passes through the
/// center (i + 0.5, j + 0.5).
struct CameraModel {
  double focal = 277.128;  // px (60 deg horizontal FOV at 320 px)
  double cx = 160.0;
  double cy = 120.0;
  int width = 320;
  int height = 240;
  double read_noise = 13.1;  // photoelectrons
  double full_well = 24000.0;  // photoelectrons

  static CameraModel from_fov(int width, int height, double hfov_rad,
                              double read_noise = 13.1,
                              double full_well = 24000.0);

  /// Throws DataError on a violated invariant.
  void validate() const;

  int pixel_count() const { return width * height; }
  /// Unit ray direction in world coordinates through continuous image
  /// coordinates (u, v).
  Vec3 ray_direction(const Pose& pose, double u, double v) const;
  /// Continuous image coordinates of a world point, or nullopt when the
  /// point is not in front of the camera.
  std::optional<Vec2> project(const Pose& pose, const Vec3& world) const;
};

}  // namespace turbid
