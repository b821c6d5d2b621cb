#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "radarmot/hungarian.hpp"
#include "radarmot/scene.hpp"
#include "radarmot/track.hpp"

namespace radarmot {

struct AssocConfig {
  double w_fwd = 1.0;          // weight of the track-forward distance term
  double w_bwd = 1.0;          // weight of the detection-backward distance term
  double w_spd = 1.0;          // weight of the speed agreement term
  double cost_gate = 2.0;      // max acceptable cross-check cost
  double infl_update = 1.25;   // box inflation when gating returns for updates
  double infl_predict = 1.5;   // box inflation when recovering missed tracks
  double delta_v = 1.0;        // max line-of-sight velocity residual, m/s
  int n_min = 2;               // a recovery needs more returns than this
  double r_suppress = 3.0;     // returns this close to any detection are spoken for, m
  double eps_speed = 0.5;      // floor for speed-normalized terms, m/s
  double v_static = 0.5;       // returns slower than this are stationary clutter, m/s
  bool use_cross_check = true; // off: plain center-distance cost with baseline_gate
  double baseline_gate = 5.0;  // center-distance gate when cross-check is off, m
};

/// Bidirectional motion-consistency cost between a predicted track and a
/// detection. Checks the track's forward extrapolation against the detection,
/// the detection's backward extrapolation against the track's previous
/// position, and the speed agreement, each normalized so that 1.0 means "off
/// by one step of plausible motion".
inline double cross_check_cost(const Track& track, const Detection& det, double dt,
                               const AssocConfig& cfg) {
  const Vec2 p_trk = track.state.position();
  const Vec2 p_det = det.box.center.head<2>();
  const double v_trk = track.state.velocity().norm();
  const double v_det = det.box.speed();
  const Vec2 p_det_prev = p_det - det.box.velocity * dt;
  const double fwd = (p_trk - p_det).norm() / std::max(v_trk * dt, cfg.eps_speed * dt);
  const double bwd =
      (track.prev_center - p_det_prev).norm() / std::max(v_det * dt, cfg.eps_speed * dt);
  const double spd = std::abs(v_trk - v_det) / std::max({v_trk, v_det, cfg.eps_speed});
  return cfg.w_fwd * fwd + cfg.w_bwd * bwd + cfg.w_spd * spd;
}

struct MatchResult {
  std::vector<std::pair<std::int64_t, int>> matches;  // (track id, detection index)
  std::vector<std::int64_t> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// First association stage: optimal track-to-detection assignment under the
/// active cost, restricted to same-class pairs, with over-gate pairs dropped
/// afterwards.
inline MatchResult match_stage1(std::span<const Track> tracks,
                                std::span<const Detection> detections, double dt,
                                const AssocConfig& cfg) {
  const int n = static_cast<int>(tracks.size());
  const int m = static_cast<int>(detections.size());
  const double gate = cfg.use_cross_check ? cfg.cost_gate : cfg.baseline_gate;

  std::vector<std::vector<double>> cost(n, std::vector<double>(m, kUnmatchableCost));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (tracks[i].class_name != detections[j].class_name) continue;
      const double c =
          cfg.use_cross_check
              ? cross_check_cost(tracks[i], detections[j], dt, cfg)
              : (tracks[i].state.position() - detections[j].box.center.head<2>()).norm();
      if (std::isfinite(c)) {
        cost[i][j] = c;
      }
    }
  }

  MatchResult out;
  std::vector<char> det_taken(m, 0);
  const std::vector<int> row_to_col = solve_assignment(cost);
  for (int i = 0; i < n; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && cost[i][j] < kUnmatchableCost && cost[i][j] <= gate) {
      out.matches.emplace_back(tracks[i].id, j);
      det_taken[j] = 1;
    } else {
      out.unmatched_tracks.push_back(tracks[i].id);
    }
  }
  for (int j = 0; j < m; ++j) {
    if (!det_taken[j]) out.unmatched_detections.push_back(j);
  }
  return out;
}

/// Returns that support a track's radar update: inside the track's inflated
/// box and within delta_v of the line-of-sight speed its velocity predicts.
inline std::vector<RadarPoint> select_radar_points_for_update(const Track& track,
                                                              std::span<const RadarPoint> points,
                                                              const AssocConfig& cfg) {
  const Box3D gate_box = inflate_box_xy(track.box, cfg.infl_update);
  std::vector<RadarPoint> out;
  for (const RadarPoint& p : points) {
    if (!point_in_box_xy(p.p_global, gate_box)) continue;
    const double v_los =
        project_velocity_los(track.state.velocity(), p.los, p.rot_ref_to_sensor());
    if (std::abs(p.v_radial - v_los) > cfg.delta_v) continue;
    out.push_back(p);
  }
  return out;
}

/// Drops returns already explained by a detection (planar distance below
/// r_suppress) and stationary clutter (|v_radial| below v_static).
inline std::vector<RadarPoint> suppress_near_detections(std::span<const RadarPoint> points,
                                                        std::span<const Detection> detections,
                                                        double r_suppress, double v_static) {
  std::vector<RadarPoint> out;
  for (const RadarPoint& p : points) {
    if (std::abs(p.v_radial) < v_static) continue;
    bool close = false;
    for (const Detection& d : detections) {
      if ((p.p_global.head<2>() - d.box.center.head<2>()).norm() < r_suppress) {
        close = true;
        break;
      }
    }
    if (!close) out.push_back(p);
  }
  return out;
}

struct RadarAssociation {
  std::int64_t track_id = 0;
  std::vector<RadarPoint> points;
};

/// Second association stage: hands leftover returns to tracks the detector
/// missed. A return gates on a track's inflated predicted box plus the
/// line-of-sight velocity residual, and goes to the track with the smallest
/// residual (ties to the lower id). Only tracks that collect more than n_min
/// returns count as radar-seen.
inline std::vector<RadarAssociation> radar_associate(
    const std::vector<const Track*>& unmatched_tracks, std::span<const RadarPoint> points,
    const AssocConfig& cfg) {
  const std::size_t n = unmatched_tracks.size();
  std::vector<std::vector<RadarPoint>> claimed(n);
  for (const RadarPoint& p : points) {
    int best = -1;
    double best_resid = std::numeric_limits<double>::infinity();
    std::int64_t best_id = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Track& trk = *unmatched_tracks[i];
      if (!point_in_box_xy(p.p_global, inflate_box_xy(trk.box, cfg.infl_predict))) continue;
      const double v_los =
          project_velocity_los(trk.state.velocity(), p.los, p.rot_ref_to_sensor());
      const double resid = std::abs(p.v_radial - v_los);
      if (resid > cfg.delta_v) continue;
      if (resid < best_resid || (resid == best_resid && trk.id < best_id)) {
        best = static_cast<int>(i);
        best_resid = resid;
        best_id = trk.id;
      }
    }
    if (best >= 0) claimed[best].push_back(p);
  }

  std::vector<RadarAssociation> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(claimed[i].size()) > cfg.n_min) {
      out.push_back({unmatched_tracks[i]->id, std::move(claimed[i])});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const RadarAssociation& a, const RadarAssociation& b) {
              return a.track_id < b.track_id;
            });
  return out;
}

}  // namespace radarmot
