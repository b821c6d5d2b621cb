#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "radarmot/errors.hpp"

namespace radarmot {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Minimum range for a usable bearing, meters.
inline constexpr double kEpsPos = 1e-6;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  a = std::fmod(a, 2.0 * pi);
  if (a <= -pi) {
    a += 2.0 * pi;
  } else if (a > pi) {
    a -= 2.0 * pi;
  }
  return a;
}

/// Rotation about +z by yaw radians.
inline Mat3 yaw_rotation(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat3 r;
  r << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

/// Rigid transform between frames: maps x in the source frame to
/// rotation * x + translation in the destination frame.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  static Pose from_yaw(double yaw, const Vec3& t = Vec3::Zero()) {
    return {yaw_rotation(yaw), t};
  }

  Pose inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }

  /// Frame composition: (a * b) maps b-source coordinates through b, then a.
  friend Pose operator*(const Pose& a, const Pose& b) {
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  }
};

inline Vec3 transform_point(const Pose& pose, const Vec3& p) {
  return pose.rotation * p + pose.translation;
}

/// Upright 3D box: center, length/width/height extents, yaw about +z, and a
/// planar velocity in the reference frame.
struct Box3D {
  Vec3 center = Vec3::Zero();
  Vec3 extents = Vec3::Ones();
  double yaw = 0.0;
  Vec2 velocity = Vec2::Zero();

  double speed() const { return velocity.norm(); }
};

/// Unit line-of-sight vector of a sensor-frame position.
inline Vec3 bearing(const Vec3& p_sensor) {
  const double n = p_sensor.norm();
  if (n <= kEpsPos) {
    throw DegenerateBearing("return too close to the sensor origin for a bearing");
  }
  return p_sensor / n;
}

/// Scales the planar extents of a box, leaving height untouched.
inline Box3D inflate_box_xy(const Box3D& box, double factor) {
  if (!(factor > 0.0)) {
    throw InvalidFactor("box inflation factor must be positive");
  }
  Box3D out = box;
  out.extents.x() *= factor;
  out.extents.y() *= factor;
  return out;
}

/// Boundary-inclusive planar containment test in the box's own frame.
inline bool point_in_box_xy(const Vec3& p, const Box3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double dx = p.x() - box.center.x();
  const double dy = p.y() - box.center.y();
  const double local_x = c * dx + s * dy;
  const double local_y = -s * dx + c * dy;
  return std::abs(local_x) <= 0.5 * box.extents.x() &&
         std::abs(local_y) <= 0.5 * box.extents.y();
}

/// Radial speed a planar reference-frame velocity produces along a sensor-frame
/// bearing: b . (R_ref_to_sensor * [vx, vy, 0]).
inline double project_velocity_los(const Vec2& v_xy, const Vec3& los,
                                   const Mat3& rot_ref_to_sensor) {
  return los.dot(rot_ref_to_sensor * Vec3(v_xy.x(), v_xy.y(), 0.0));
}

}  // namespace radarmot
