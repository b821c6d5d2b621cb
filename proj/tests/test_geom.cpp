#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <radarmot/geom.hpp>

namespace rm = radarmot;
using rm::Vec2;
using rm::Vec3;

constexpr double kPi = std::numbers::pi;

TEST(WrapAngle, StaysInHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(rm::wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(rm::wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(rm::wrap_angle(-kPi), kPi);
  EXPECT_NEAR(rm::wrap_angle(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(rm::wrap_angle(2.0 * kPi), 0.0, 1e-12);
  EXPECT_NEAR(rm::wrap_angle(-0.5 * kPi), -0.5 * kPi, 1e-12);
  for (int i = -50; i <= 50; ++i) {
    const double a = 0.37 * i;
    const double w = rm::wrap_angle(a);
    EXPECT_GT(w, -kPi - 1e-12);
    EXPECT_LE(w, kPi + 1e-12);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
  }
}

TEST(YawRotation, QuarterTurn) {
  const rm::Mat3 r = rm::yaw_rotation(0.5 * kPi);
  const Vec3 p = r * Vec3(1.0, 0.0, 0.0);
  EXPECT_NEAR(p.x(), 0.0, 1e-12);
  EXPECT_NEAR(p.y(), 1.0, 1e-12);
  EXPECT_NEAR(p.z(), 0.0, 1e-12);
  EXPECT_NEAR((r * r.transpose() - rm::Mat3::Identity()).norm(), 0.0, 1e-12);
}

TEST(Pose, TransformQuarterTurnWithOffset) {
  const rm::Pose pose = rm::Pose::from_yaw(0.5 * kPi, Vec3(1.0, 1.0, 0.0));
  const Vec3 p = rm::transform_point(pose, Vec3(1.0, 0.0, 0.0));
  EXPECT_NEAR(p.x(), 1.0, 1e-12);
  EXPECT_NEAR(p.y(), 2.0, 1e-12);
  EXPECT_NEAR(p.z(), 0.0, 1e-12);
}

TEST(Pose, InverseRoundTrip) {
  const rm::Pose pose = rm::Pose::from_yaw(0.3, Vec3(2.0, -1.0, 0.5));
  const Vec3 p(4.0, 5.0, 6.0);
  const Vec3 back = rm::transform_point(pose.inverse(), rm::transform_point(pose, p));
  EXPECT_NEAR((back - p).norm(), 0.0, 1e-12);
}

TEST(Pose, CompositionAppliesRightFirst) {
  const rm::Pose a = rm::Pose::from_yaw(0.4, Vec3(1.0, 0.0, 0.0));
  const rm::Pose b = rm::Pose::from_yaw(-0.9, Vec3(0.0, 2.0, 0.0));
  const Vec3 p(3.0, 1.0, -1.0);
  const Vec3 seq = rm::transform_point(a, rm::transform_point(b, p));
  const Vec3 composed = rm::transform_point(a * b, p);
  EXPECT_NEAR((seq - composed).norm(), 0.0, 1e-12);
}

TEST(Bearing, UnitVectorExamples) {
  const Vec3 b1 = rm::bearing(Vec3(3.0, 4.0, 0.0));
  EXPECT_DOUBLE_EQ(b1.x(), 0.6);
  EXPECT_DOUBLE_EQ(b1.y(), 0.8);
  EXPECT_DOUBLE_EQ(b1.z(), 0.0);

  const Vec3 b2 = rm::bearing(Vec3(1.0, 1.0, std::sqrt(2.0)));
  EXPECT_NEAR(b2.x(), 0.5, 1e-12);
  EXPECT_NEAR(b2.y(), 0.5, 1e-12);
  EXPECT_NEAR(b2.z(), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(b2.norm(), 1.0, 1e-12);
}

TEST(Bearing, ThrowsAtOrigin) {
  EXPECT_THROW(rm::bearing(Vec3::Zero()), rm::DegenerateBearing);
  EXPECT_THROW(rm::bearing(Vec3(1e-7, 0.0, 0.0)), rm::DegenerateBearing);
  EXPECT_NO_THROW(rm::bearing(Vec3(1e-5, 0.0, 0.0)));
}

TEST(InflateBox, ScalesPlanarExtentsOnly) {
  rm::Box3D box;
  box.extents = Vec3(4.0, 2.0, 1.5);
  const rm::Box3D out = rm::inflate_box_xy(box, 1.25);
  EXPECT_DOUBLE_EQ(out.extents.x(), 5.0);
  EXPECT_DOUBLE_EQ(out.extents.y(), 2.5);
  EXPECT_DOUBLE_EQ(out.extents.z(), 1.5);
  EXPECT_THROW(rm::inflate_box_xy(box, 0.0), rm::InvalidFactor);
  EXPECT_THROW(rm::inflate_box_xy(box, -1.0), rm::InvalidFactor);
}

TEST(PointInBox, AxisAlignedWithBoundary) {
  rm::Box3D box;
  box.extents = Vec3(4.0, 2.0, 1.5);
  EXPECT_TRUE(rm::point_in_box_xy(Vec3(1.9, 0.9, 0.0), box));
  EXPECT_FALSE(rm::point_in_box_xy(Vec3(2.1, 0.0, 0.0), box));
  EXPECT_TRUE(rm::point_in_box_xy(Vec3(2.0, 1.0, 0.0), box));
  EXPECT_TRUE(rm::point_in_box_xy(Vec3(-2.0, -1.0, 5.0), box));
}

TEST(PointInBox, RespectsYawAndCenter) {
  rm::Box3D box;
  box.center = Vec3(10.0, 0.0, 0.0);
  box.extents = Vec3(4.0, 2.0, 1.5);
  box.yaw = 0.5 * kPi;
  EXPECT_TRUE(rm::point_in_box_xy(Vec3(10.0, 1.9, 0.0), box));
  EXPECT_TRUE(rm::point_in_box_xy(Vec3(10.9, 0.0, 0.0), box));
  EXPECT_FALSE(rm::point_in_box_xy(Vec3(11.1, 0.0, 0.0), box));
}

TEST(ProjectVelocityLos, IdentityMount) {
  const double v = rm::project_velocity_los(Vec2(5.0, 0.0), Vec3(0.6, 0.8, 0.0),
                                            rm::Mat3::Identity());
  EXPECT_DOUBLE_EQ(v, 3.0);
}

TEST(ProjectVelocityLos, RotatedMount) {
  // sensor yawed +90 degrees; a +x reference velocity appears along sensor -y
  const rm::Mat3 rot_ref_to_sensor = rm::yaw_rotation(0.5 * kPi).transpose();
  const double v =
      rm::project_velocity_los(Vec2(5.0, 0.0), Vec3(0.0, -1.0, 0.0), rot_ref_to_sensor);
  EXPECT_NEAR(v, 5.0, 1e-12);
}

TEST(Box3D, SpeedIsVelocityNorm) {
  rm::Box3D box;
  box.velocity = Vec2(3.0, 4.0);
  EXPECT_DOUBLE_EQ(box.speed(), 5.0);
}
