#pragma once

#include <Eigen/Geometry>

namespace turbid {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

/// Rigid pose of a camera or light. The local frame follows the usual
/// computer-vision convention: +z is the viewing (or beam) axis, +x is image
/// right and +y is image down.
class Pose {
 public:
  Pose();
  Pose(const Vec3& position, const Eigen::Quaterniond& orientation);

  /// Pose at `position` looking at `target`. `up_hint` selects the image
  /// up direction; it must not be parallel to the viewing direction.
  static Pose look_at(const Vec3& position, const Vec3& target,
                      const Vec3& up_hint = Vec3::UnitY());

  /// Pose facing nadir (world -z) and then tilted: first about the world x
  /// axis by `tilt_x`, then about world y by `tilt_y`, then yawed about
  /// world z. All angles in radians. With zero angles image right is world +x.
  static Pose from_tilts(const Vec3& position, double tilt_x, double tilt_y,
                         double yaw = 0.0);

  const Vec3& position() const { return position_; }
  const Eigen::Quaterniond& orientation() const { return orientation_; }
  Mat3 rotation() const { return orientation_.toRotationMatrix(); }

  /// Unit viewing / beam direction in world coordinates.
  Vec3 forward() const { return orientation_ * Vec3::UnitZ(); }
  Vec3 right() const { return orientation_ * Vec3::UnitX(); }
  Vec3 down() const { return orientation_ * Vec3::UnitY(); }

  Vec3 to_local(const Vec3& world) const;
  Vec3 to_world(const Vec3& local) const;

  /// Recover the nadir tilt angles (tilt_x, tilt_y, yaw) used by from_tilts.
  Eigen::Vector3d tilts() const;

  bool is_finite() const;

 private:
  Vec3 position_;
  Eigen::Quaterniond orientation_;
};

/// Joint camera + light configuration at a discrete time step.
struct JointView {
  Pose camera;
  Pose light;
  int t = 0;
};

}  // namespace turbid
