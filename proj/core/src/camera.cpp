#include "turbid/camera.hpp"

#include <cmath>

#include "turbid/errors.hpp"

namespace turbid {

CameraModel CameraModel::from_fov(int width, int height, double hfov_rad, double read_noise,
                                  double full_well) {
  CameraModel m;
  m.width = width;
  m.height = height;
  m.cx = 0.5 * width;
  m.cy = 0.5 * height;
  m.focal = 0.5 * width / std::tan(0.5 * hfov_rad);
  m.read_noise = read_noise;
  m.full_well = full_well;
  m.validate();
  return m;
}

void CameraModel::validate() const {
  if (!(focal > 0.0)) throw DataError("camera focal length must be positive");
  if (width <= 0 || height <= 0) throw DataError("camera image size must be positive");
  if (!(read_noise >= 0.0)) throw DataError("read noise must be nonnegative");
  if (!(full_well > 0.0)) throw DataError("full-well capacity must be positive");
}

Vec3 CameraModel::ray_direction(const Pose& pose, double u, double v) const {
  const Vec3 local((u - cx) / focal, (v - cy) / focal, 1.0);
  return (pose.orientation() * local).normalized();
}

std::optional<Vec2> CameraModel::project(const Pose& pose, const Vec3& world) const {
  const Vec3 local = pose.to_local(world);
  if (local.z() <= 0.0) return std::nullopt;
  return Vec2(focal * local.x() / local.z() + cx, focal * local.y() / local.z() + cy);
}

}  // namespace turbid
