#include "turbid/pose.hpp"

#include <algorithm>
#include <cmath>

#include "turbid/errors.hpp"

namespace turbid {

namespace {

// Nadir-facing base orientation: image right = +x, image down = -y,
// forward = -z.
Mat3 nadir_basis() {
  Mat3 m;
  m << 1, 0, 0,
       0, -1, 0,
       0, 0, -1;
  return m;
}

}  // namespace

Pose::Pose() : position_(Vec3::Zero()), orientation_(Eigen::Quaterniond::Identity()) {}

Pose::Pose(const Vec3& position, const Eigen::Quaterniond& orientation)
    : position_(position), orientation_(orientation) {
  const double n = orientation_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DataError("pose orientation must be a nonzero finite quaternion");
  }
  orientation_.normalize();
}

Pose Pose::look_at(const Vec3& position, const Vec3& target, const Vec3& up_hint) {
  const Vec3 forward = (target - position).normalized();
  Vec3 right = forward.cross(up_hint);
  if (right.squaredNorm() < 1e-18) {
    right = forward.cross(Vec3::UnitX());
  }
  right.normalize();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Pose(position, Eigen::Quaterniond(r));
}

Pose Pose::from_tilts(const Vec3& position, double tilt_x, double tilt_y, double yaw) {
  const Mat3 r = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(tilt_y, Vec3::UnitY()) *
                  Eigen::AngleAxisd(tilt_x, Vec3::UnitX()))
                     .toRotationMatrix() *
                 nadir_basis();
  return Pose(position, Eigen::Quaterniond(r));
}

Vec3 Pose::to_local(const Vec3& world) const {
  return orientation_.conjugate() * (world - position_);
}

Vec3 Pose::to_world(const Vec3& local) const { return orientation_ * local + position_; }

Eigen::Vector3d Pose::tilts() const {
  // rotation() = Rz(yaw) Ry(tilt_y) Rx(tilt_x) N with N its own inverse.
  const Mat3 m = rotation() * nadir_basis();
  const double tilt_y = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  const double tilt_x = std::atan2(m(2, 1), m(2, 2));
  const double yaw = std::atan2(m(1, 0), m(0, 0));
  return {tilt_x, tilt_y, yaw};
}

bool Pose::is_finite() const {
  return position_.allFinite() && orientation_.coeffs().allFinite();
}

}  // namespace turbid
