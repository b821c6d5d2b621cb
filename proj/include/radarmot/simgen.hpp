#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "radarmot/scene.hpp"

namespace radarmot {

/// Deterministic random stream. All distributions are derived from the raw
/// 64-bit engine output by fixed arithmetic, so identical seeds give
/// bit-identical draws on every platform and standard library.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal(double sigma) {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return sigma * v;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return sigma * radius * std::cos(angle);
  }

  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double u = uniform01();
    double p = std::exp(-mean);
    double cum = p;
    int k = 0;
    while (u > cum && k < 10000) {
      k += 1;
      p *= mean / k;
      cum += p;
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct ClassSpec {
  std::string name = "car";
  int count = 8;
  double speed_min = 5.0;
  double speed_max = 15.0;
  Vec3 extents = Vec3(4.5, 2.0, 1.8);
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::string name;  // empty: derived from the seed
  double duration_s = 20.0;
  double keyframe_hz = 2.0;
  int sweeps_per_keyframe = 3;
  std::vector<ClassSpec> classes = {ClassSpec{}};
  double lane_fraction = 0.6;   // objects moving parallel to the ego lane
  double turn_rate_max = 0.0;   // per-object curvature bound, rad/s
  double spawn_min = 20.0;      // spawn distance band from the ego start, m
  double spawn_max = 120.0;
  double ego_speed = 10.0;      // m/s along +x (or along a circle when turning)
  double ego_omega = 0.0;       // rad/s
  // detection channel
  double sigma_pos = 0.3;       // m
  double sigma_vel = 0.5;       // m/s
  double sigma_yaw = 0.05;      // rad
  double dropout_base = 0.0;
  double dropout_per_100m = 0.0;
  double score_base = 0.9;
  double score_per_100m = 0.15;  // mean score falloff per 100 m
  double score_sigma = 0.05;
  // radar channel
  double radar_pts_near = 4.0;   // per object, per sensor, per sweep at range 0
  double radar_pts_far = 1.0;    // same, at radar_far_range
  double radar_far_range = 200.0;
  double radar_max_range = 250.0;
  double radar_sigma_radial = 0.3;  // m/s, along the line of sight
  double radar_sigma_pos = 0.1;     // m, on the sampled surface point
  double clutter_density = 1e-4;    // points / m^2, per sensor per sweep
  double clutter_radius = 150.0;    // clutter field radius around the ego, m
  double clutter_sigma_radial = 0.2;  // m/s, residual motion of static clutter
  std::map<std::string, std::string> conditions;
};

namespace detail {

struct SimObject {
  std::string instance_id;
  std::string class_name;
  Vec3 extents = Vec3::Ones();
  Vec2 p0 = Vec2::Zero();
  double heading0 = 0.0;
  double speed = 0.0;
  double turn_rate = 0.0;
  double z = 0.0;

  Vec2 position(double t) const {
    if (std::abs(turn_rate) < 1e-9) {
      return p0 + t * speed * Vec2(std::cos(heading0), std::sin(heading0));
    }
    const double h = heading0 + turn_rate * t;
    const double radius = speed / turn_rate;
    return p0 + radius * Vec2(std::sin(h) - std::sin(heading0),
                              -std::cos(h) + std::cos(heading0));
  }

  double heading(double t) const { return heading0 + turn_rate * t; }

  Vec2 velocity(double t) const {
    const double h = heading(t);
    return speed * Vec2(std::cos(h), std::sin(h));
  }
};

inline EgoState ego_at(const ScenarioConfig& cfg, double t) {
  EgoState ego;
  if (std::abs(cfg.ego_omega) < 1e-9) {
    ego.pose.translation = Vec3(cfg.ego_speed * t, 0.0, 0.0);
    ego.v_ego = Vec3(cfg.ego_speed, 0.0, 0.0);
  } else {
    const double yaw = cfg.ego_omega * t;
    const double radius = cfg.ego_speed / cfg.ego_omega;
    ego.pose.rotation = yaw_rotation(yaw);
    ego.pose.translation =
        Vec3(radius * std::sin(yaw), radius * (1.0 - std::cos(yaw)), 0.0);
    ego.v_ego = Vec3(cfg.ego_speed * std::cos(yaw), cfg.ego_speed * std::sin(yaw), 0.0);
    ego.omega_ego = Vec3(0.0, 0.0, cfg.ego_omega);
  }
  return ego;
}

/// Samples one reflection point on the box face closest to the sensor,
/// expressed in the reference frame.
inline Vec3 sample_face_point(const SimObject& obj, double t, const Vec3& sensor_origin,
                              double sigma_pos, SimRng& rng) {
  const Vec2 c = obj.position(t);
  const double yaw = obj.heading(t);
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  const double dx = sensor_origin.x() - c.x();
  const double dy = sensor_origin.y() - c.y();
  const double local_x = cy * dx + sy * dy;
  const double local_y = -sy * dx + cy * dy;
  const double half_l = 0.5 * obj.extents.x();
  const double half_w = 0.5 * obj.extents.y();

  double fx;
  double fy;
  if (std::abs(local_x) / half_l >= std::abs(local_y) / half_w) {
    fx = local_x >= 0.0 ? half_l : -half_l;
    fy = rng.uniform(-0.9 * half_w, 0.9 * half_w);
  } else {
    fy = local_y >= 0.0 ? half_w : -half_w;
    fx = rng.uniform(-0.9 * half_l, 0.9 * half_l);
  }
  fx += rng.normal(sigma_pos);
  fy += rng.normal(sigma_pos);
  const double fz = obj.z + rng.uniform(-0.25 * obj.extents.z(), 0.25 * obj.extents.z());
  return Vec3(c.x() + cy * fx - sy * fy, c.y() + sy * fx + cy * fy, fz);
}

}  // namespace detail

inline void validate(const ScenarioConfig& cfg) {
  const auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(cfg.duration_s > 0.0)) throw InvalidConfig("duration_s must be positive");
  if (!(cfg.keyframe_hz > 0.0)) throw InvalidConfig("keyframe_hz must be positive");
  if (cfg.sweeps_per_keyframe < 1) throw InvalidConfig("sweeps_per_keyframe must be >= 1");
  if (!in01(cfg.lane_fraction)) throw InvalidConfig("lane_fraction must lie in [0,1]");
  if (!in01(cfg.dropout_base) || cfg.dropout_per_100m < 0.0) {
    throw InvalidConfig("dropout rates must be non-negative and the base in [0,1]");
  }
  if (cfg.sigma_pos < 0.0 || cfg.sigma_vel < 0.0 || cfg.sigma_yaw < 0.0 ||
      cfg.score_sigma < 0.0 || cfg.radar_sigma_radial < 0.0 || cfg.radar_sigma_pos < 0.0 ||
      cfg.clutter_sigma_radial < 0.0) {
    throw InvalidConfig("noise sigmas must be non-negative");
  }
  if (!(cfg.spawn_max > cfg.spawn_min) || cfg.spawn_min < 0.0) {
    throw InvalidConfig("spawn band must satisfy 0 <= spawn_min < spawn_max");
  }
  if (cfg.clutter_density < 0.0 || cfg.clutter_radius < 0.0) {
    throw InvalidConfig("clutter parameters must be non-negative");
  }
  for (const ClassSpec& spec : cfg.classes) {
    if (spec.count < 0) throw InvalidConfig("class count must be non-negative");
    if (!(spec.speed_max >= spec.speed_min) || spec.speed_min < 0.0) {
      throw InvalidConfig("class speed range must satisfy 0 <= min <= max");
    }
    if (!(spec.extents.minCoeff() > 0.0)) {
      throw InvalidConfig("class extents must be strictly positive");
    }
  }
}

/// Generates a fully deterministic synthetic scenario: exact ground truth,
/// noisy range-degraded detections, and multi-sweep radar with surface-point
/// returns and static clutter.
inline Scenario generate(const ScenarioConfig& cfg) {
  validate(cfg);
  SimRng rng(cfg.seed);

  Scenario scene;
  scene.name = cfg.name.empty() ? "sim-seed" + std::to_string(cfg.seed) : cfg.name;
  scene.conditions = cfg.conditions;
  scene.sensors["radar_front"] = Pose{Mat3::Identity(), Vec3(3.0, 0.0, 1.0)};
  scene.sensors["radar_rear"] = Pose{yaw_rotation(std::numbers::pi), Vec3(-1.0, 0.0, 1.0)};

  // spawn objects around the ego start position
  const Vec2 ego0 = detail::ego_at(cfg, 0.0).pose.translation.head<2>();
  std::vector<detail::SimObject> objects;
  for (const ClassSpec& spec : cfg.classes) {
    for (int k = 0; k < spec.count; ++k) {
      detail::SimObject obj;
      obj.instance_id = spec.name + "-" + std::to_string(k);
      obj.class_name = spec.name;
      obj.extents = spec.extents;
      obj.z = 0.5 * spec.extents.z();
      obj.speed = rng.uniform(spec.speed_min, spec.speed_max);
      obj.turn_rate = cfg.turn_rate_max > 0.0
                          ? rng.uniform(-cfg.turn_rate_max, cfg.turn_rate_max)
                          : 0.0;
      if (rng.uniform01() < cfg.lane_fraction) {
        // lane traffic: parallel to the ego lane, ahead or behind
        const double along = rng.uniform(cfg.spawn_min, cfg.spawn_max) *
                             (rng.uniform01() < 0.7 ? 1.0 : -1.0);
        const double lateral = rng.uniform(-12.0, 12.0);
        obj.p0 = ego0 + Vec2(along, lateral);
        obj.heading0 = rng.uniform01() < 0.8 ? 0.0 : std::numbers::pi;
      } else {
        // crossing traffic: anywhere in the spawn annulus, any heading
        const double range = rng.uniform(cfg.spawn_min, cfg.spawn_max);
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        obj.p0 = ego0 + range * Vec2(std::cos(angle), std::sin(angle));
        obj.heading0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      objects.push_back(std::move(obj));
    }
  }

  const int n_frames = std::max(1, static_cast<int>(std::floor(cfg.duration_s * cfg.keyframe_hz)));
  const double dt_key = 1.0 / cfg.keyframe_hz;
  const double dt_sweep = dt_key / cfg.sweeps_per_keyframe;

  for (int k = 0; k < n_frames; ++k) {
    const double t_k = k * dt_key;
    Frame frame;
    frame.frame_id = k;
    frame.t = t_k;
    frame.ego = detail::ego_at(cfg, t_k);
    const Vec2 ego_xy = frame.ego.pose.translation.head<2>();

    // exact ground truth
    for (const detail::SimObject& obj : objects) {
      GtBox g;
      g.instance_id = obj.instance_id;
      g.class_name = obj.class_name;
      const Vec2 p = obj.position(t_k);
      g.box.center = Vec3(p.x(), p.y(), obj.z);
      g.box.extents = obj.extents;
      g.box.yaw = wrap_angle(obj.heading(t_k));
      g.box.velocity = obj.velocity(t_k);
      frame.gt.push_back(std::move(g));
    }

    // degraded detections
    for (const detail::SimObject& obj : objects) {
      const Vec2 p = obj.position(t_k);
      const double range = (p - ego_xy).norm();
      const double p_drop =
          std::min(1.0, cfg.dropout_base + cfg.dropout_per_100m * range / 100.0);
      if (rng.uniform01() < p_drop) continue;
      Detection det;
      det.class_name = obj.class_name;
      det.box.center = Vec3(p.x() + rng.normal(cfg.sigma_pos), p.y() + rng.normal(cfg.sigma_pos),
                            obj.z + rng.normal(0.5 * cfg.sigma_pos));
      det.box.extents = obj.extents;
      det.box.yaw = wrap_angle(obj.heading(t_k) + rng.normal(cfg.sigma_yaw));
      det.box.velocity = obj.velocity(t_k) +
                         Vec2(rng.normal(cfg.sigma_vel), rng.normal(cfg.sigma_vel));
      const double score = cfg.score_base - cfg.score_per_100m * range / 100.0 +
                           rng.normal(cfg.score_sigma);
      det.score = std::clamp(score, 0.05, 1.0);
      frame.detections.push_back(std::move(det));
    }

    // radar sweeps, oldest first, the last one at the keyframe
    SweepBundle bundle;
    bundle.t_keyframe = t_k;
    bundle.ego_keyframe = frame.ego;
    for (int sw = 0; sw < cfg.sweeps_per_keyframe; ++sw) {
      Sweep sweep;
      sweep.t = t_k - (cfg.sweeps_per_keyframe - 1 - sw) * dt_sweep;
      sweep.ego = detail::ego_at(cfg, sweep.t);
      const Vec3 pivot =
          transform_point(sweep.ego.pose, sweep.ego.rotation_center);
      for (const auto& [sensor_id, mount] : scene.sensors) {
        const Pose sensor_pose = sweep.ego.pose * mount;
        const Vec3 origin = sensor_pose.translation;
        const Pose sensor_inv = sensor_pose.inverse();

        for (const detail::SimObject& obj : objects) {
          const Vec2 p = obj.position(sweep.t);
          const double range = (p - Vec2(origin.x(), origin.y())).norm();
          if (range > cfg.radar_max_range) continue;
          const double frac = std::clamp(range / cfg.radar_far_range, 0.0, 1.0);
          const int n_pts = static_cast<int>(std::lround(
              cfg.radar_pts_near + frac * (cfg.radar_pts_far - cfg.radar_pts_near)));
          const Vec2 v_obj = obj.velocity(sweep.t);
          for (int i = 0; i < n_pts; ++i) {
            const Vec3 q = detail::sample_face_point(obj, sweep.t, origin,
                                                     cfg.radar_sigma_pos, rng);
            RawRadarReturn raw;
            raw.sensor_id = sensor_id;
            raw.sensor_pose = sensor_pose;
            raw.p_sensor = transform_point(sensor_inv, q);
            if (raw.p_sensor.norm() <= kEpsPos) continue;
            const Vec3 v_point(v_obj.x(), v_obj.y(), 0.0);
            raw.v_rel = v_point - sweep.ego.v_ego - sweep.ego.omega_ego.cross(q - pivot);
            const Vec3 los_ref = sensor_pose.rotation * bearing(raw.p_sensor);
            raw.v_rel += rng.normal(cfg.radar_sigma_radial) * los_ref;
            sweep.points.push_back(std::move(raw));
          }
        }

        // static clutter across the field, with residual radial motion
        const double area = std::numbers::pi * cfg.clutter_radius * cfg.clutter_radius;
        const int n_clutter = rng.poisson(cfg.clutter_density * area);
        for (int i = 0; i < n_clutter; ++i) {
          const double radius = cfg.clutter_radius * std::sqrt(rng.uniform01());
          const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
          const Vec3 q(ego_xy.x() + radius * std::cos(angle),
                       ego_xy.y() + radius * std::sin(angle), rng.uniform(0.0, 2.0));
          RawRadarReturn raw;
          raw.sensor_id = sensor_id;
          raw.sensor_pose = sensor_pose;
          raw.p_sensor = transform_point(sensor_inv, q);
          if (raw.p_sensor.norm() <= kEpsPos) continue;
          raw.v_rel = -sweep.ego.v_ego - sweep.ego.omega_ego.cross(q - pivot);
          const Vec3 los_ref = sensor_pose.rotation * bearing(raw.p_sensor);
          raw.v_rel += rng.normal(cfg.clutter_sigma_radial) * los_ref;
          sweep.points.push_back(std::move(raw));
        }
      }
      bundle.sweeps.push_back(std::move(sweep));
    }
    frame.sweeps = std::move(bundle);
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

}  // namespace radarmot
