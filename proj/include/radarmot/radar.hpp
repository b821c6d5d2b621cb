#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "radarmot/geom.hpp"

namespace radarmot {

/// Default radius around the ego vehicle inside which radar returns are
/// discarded, meters.
inline constexpr double kDefaultExcludeRadius = 15.0;

/// One radar return after motion compensation, aligned to a keyframe.
struct RadarPoint {
  Vec3 p_sensor = Vec3::Zero();   // sensor frame, at sweep time
  Vec3 p_global = Vec3::Zero();   // reference frame, keyframe-aligned
  Vec3 los = Vec3::UnitX();       // unit line of sight, sensor frame
  Vec3 v_rel = Vec3::Zero();      // reported relative velocity, reference-frame axes
  Vec3 v_comp = Vec3::Zero();     // velocity after ego-motion removal
  double v_radial = 0.0;          // ego-free speed along the line of sight
  double t_sweep = 0.0;
  std::string sensor_id;
  Pose sensor_pose;               // sensor -> reference, at sweep time

  Mat3 rot_ref_to_sensor() const { return sensor_pose.rotation.transpose(); }
};

/// Ego vehicle state in the reference frame.
struct EgoState {
  Pose pose;                            // ego -> reference
  Vec3 v_ego = Vec3::Zero();            // m/s, reference-frame axes
  Vec3 omega_ego = Vec3::Zero();        // rad/s
  Vec3 rotation_center = Vec3::Zero();  // pivot of the rotation, ego frame
};

/// One raw return inside a sweep, before compensation.
struct RawRadarReturn {
  std::string sensor_id;
  Vec3 p_sensor = Vec3::Zero();
  Vec3 v_rel = Vec3::Zero();
  Pose sensor_pose;  // sensor -> reference, at sweep time
};

struct Sweep {
  double t = 0.0;
  EgoState ego;
  std::vector<RawRadarReturn> points;
};

/// All sweeps feeding one keyframe; sweeps ascend in time and end at or before
/// the keyframe.
struct SweepBundle {
  double t_keyframe = 0.0;
  EgoState ego_keyframe;
  std::vector<Sweep> sweeps;
};

/// Removes translational and rotational ego motion from a return's reported
/// relative velocity. Fills v_comp and the ego-free radial speed along the
/// line of sight; p_global must already hold the reflector position.
inline Vec3 compensate_ego(RadarPoint& point, const EgoState& ego) {
  const Vec3 pivot = transform_point(ego.pose, ego.rotation_center);
  const Vec3 lever = point.p_global - pivot;
  point.v_comp = point.v_rel + ego.v_ego + ego.omega_ego.cross(lever);
  point.v_radial = point.los.dot(point.rot_ref_to_sensor() * point.v_comp);
  return point.v_comp;
}

/// Moves a return along its line of sight by v_radial times the sweep-to-
/// keyframe gap. The tangential part of the motion is unobservable and left
/// untouched.
inline Vec3 compensate_position(const RadarPoint& point, double t_keyframe) {
  const Vec3 los_ref = point.sensor_pose.rotation * point.los;
  return point.p_global + point.v_radial * (t_keyframe - point.t_sweep) * los_ref;
}

/// Compensates and merges every sweep of a bundle into one keyframe-aligned
/// point cloud. Returns closer than r_exclude to the ego position (planar
/// distance at the keyframe) are discarded. Output is ordered by sweep time,
/// then sensor id, then input order.
inline std::vector<RadarPoint> aggregate_sweeps(const SweepBundle& bundle,
                                                double r_exclude = kDefaultExcludeRadius) {
  if (bundle.sweeps.empty()) {
    throw EmptyBundle("sweep bundle holds no sweeps");
  }
  const Vec2 ego_xy = bundle.ego_keyframe.pose.translation.head<2>();
  std::vector<RadarPoint> out;
  for (const Sweep& sweep : bundle.sweeps) {
    for (const RawRadarReturn& raw : sweep.points) {
      RadarPoint p;
      p.sensor_id = raw.sensor_id;
      p.sensor_pose = raw.sensor_pose;
      p.p_sensor = raw.p_sensor;
      p.v_rel = raw.v_rel;
      p.t_sweep = sweep.t;
      p.los = bearing(raw.p_sensor);
      p.p_global = transform_point(raw.sensor_pose, raw.p_sensor);
      compensate_ego(p, sweep.ego);
      p.p_global = compensate_position(p, bundle.t_keyframe);
      if ((p.p_global.head<2>() - ego_xy).norm() < r_exclude) {
        continue;
      }
      out.push_back(std::move(p));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RadarPoint& a, const RadarPoint& b) {
    if (a.t_sweep != b.t_sweep) return a.t_sweep < b.t_sweep;
    return a.sensor_id < b.sensor_id;
  });
  return out;
}

/// Ego state interpolated between two keyframe states: linear in translation
/// and rates, spherical in rotation.
inline EgoState interpolate_ego(const EgoState& a, double ta, const EgoState& b, double tb,
                                double t) {
  if (!(tb > ta)) {
    return b;
  }
  const double u = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
  const Eigen::Quaterniond qa(a.pose.rotation);
  const Eigen::Quaterniond qb(b.pose.rotation);
  EgoState out;
  out.pose.rotation = qa.slerp(u, qb).toRotationMatrix();
  out.pose.translation = (1.0 - u) * a.pose.translation + u * b.pose.translation;
  out.v_ego = (1.0 - u) * a.v_ego + u * b.v_ego;
  out.omega_ego = (1.0 - u) * a.omega_ego + u * b.omega_ego;
  out.rotation_center = (1.0 - u) * a.rotation_center + u * b.rotation_center;
  return out;
}

}  // namespace radarmot
