#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "radarmot/assoc.hpp"

namespace radarmot {

struct TrackerConfig {
  AssocConfig assoc;
  LifecycleConfig lifecycle;
  ProcessModel model;
  double sigma_radial = 0.5;   // radar radial speed noise, m/s
  double sigma_det_pos = 0.5;  // detection center noise, m
  double p0_pos = 1.0;         // birth position variance, m^2
  double p0_vel = 4.0;         // birth velocity variance, (m/s)^2
  double box_smoothing = 0.5;  // blend toward matched detections for shape, yaw and score
  double r_exclude = kDefaultExcludeRadius;
  bool enable_radar_kf = true;     // radial-velocity state updates
  bool enable_radar_assoc = true;  // second-stage recovery of missed tracks
  bool enable_cross_check = true;  // bidirectional stage-1 cost (off: center distance)
};

/// Frame-by-frame tracking engine: predict, associate in two stages, refine
/// with radar, manage lifecycles. Coasting tracks are never emitted.
class Tracker {
 public:
  explicit Tracker(const TrackerConfig& cfg = {}) : cfg_(cfg) {
    cfg_.assoc.use_cross_check = cfg_.enable_cross_check;
  }

  std::vector<TrackOutput> step(const Frame& frame) {
    if (last_t_ && !(frame.t > *last_t_)) {
      throw NonMonotonicTime("keyframe times must be strictly increasing");
    }
    const double dt = last_t_ ? frame.t - *last_t_ : 0.0;
    last_t_ = frame.t;

    const std::vector<RadarPoint> radar =
        frame.sweeps ? aggregate_sweeps(*frame.sweeps, cfg_.r_exclude) : frame.radar_points;

    // 1. predict every live track to the keyframe
    for (Track& trk : tracks_) {
      trk.prev_center = trk.state.position();
      trk.state = kf_predict(trk.state, cfg_.model, frame.t - trk.state.t);
      trk.sync_box_from_state();
    }

    std::unordered_map<std::int64_t, std::size_t> index_of;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      index_of[tracks_[i].id] = i;
    }

    // 2. first stage: assign detections to tracks
    const MatchResult mr = match_stage1(tracks_, frame.detections, dt, cfg_.assoc);

    const std::size_t n_before = tracks_.size();
    std::vector<char> det_hit(n_before, 0);
    std::vector<char> radar_hit(n_before, 0);

    // 3. detection updates, then radar refinement of the updated state
    for (const auto& [track_id, det_idx] : mr.matches) {
      Track& trk = tracks_[index_of.at(track_id)];
      const Detection& det = frame.detections[det_idx];
      det_hit[index_of.at(track_id)] = 1;

      DetectionObservation obs;
      obs.z = det.box.center.head<2>();
      obs.R_det = cfg_.sigma_det_pos * cfg_.sigma_det_pos * Eigen::Matrix2d::Identity();
      trk.state = kf_update_detection(trk.state, obs);
      absorb_detection(trk, det);
      trk.sync_box_from_state();

      if (cfg_.enable_radar_kf && !radar.empty()) {
        const auto pts = select_radar_points_for_update(trk, radar, cfg_.assoc);
        if (!pts.empty()) {
          trk.state = kf_update_radar(trk.state, build_radar_observation(pts, cfg_.sigma_radial));
          trk.sync_box_from_state();
        }
      }
    }

    // 4. second stage: recover unmatched tracks from leftover returns
    if (cfg_.enable_radar_assoc && !mr.unmatched_tracks.empty() && !radar.empty()) {
      const auto leftover = suppress_near_detections(radar, frame.detections,
                                                     cfg_.assoc.r_suppress, cfg_.assoc.v_static);
      std::vector<const Track*> unmatched;
      unmatched.reserve(mr.unmatched_tracks.size());
      for (const std::int64_t id : mr.unmatched_tracks) {
        unmatched.push_back(&tracks_[index_of.at(id)]);
      }
      for (const RadarAssociation& ra : radar_associate(unmatched, leftover, cfg_.assoc)) {
        const std::size_t idx = index_of.at(ra.track_id);
        radar_hit[idx] = 1;
        if (cfg_.enable_radar_kf) {
          Track& trk = tracks_[idx];
          trk.state =
              kf_update_radar(trk.state, build_radar_observation(ra.points, cfg_.sigma_radial));
          trk.sync_box_from_state();
        }
      }
    }

    // 5. lifecycle counters
    for (std::size_t i = 0; i < n_before; ++i) {
      Track& trk = tracks_[i];
      const bool seen =
          det_hit[i] || (radar_hit[i] && cfg_.lifecycle.radar_seen_counts_as_hit);
      if (seen) {
        trk.hits += 1;
        trk.misses = 0;
        trk.last_seen_by = det_hit[i] ? Provenance::Detection : Provenance::Radar;
        if (trk.status == TrackStatus::Tentative && trk.hits >= cfg_.lifecycle.confirm_hits) {
          trk.status = TrackStatus::Confirmed;
        }
      } else {
        trk.misses += 1;
        const int limit = trk.status == TrackStatus::Confirmed
                              ? cfg_.lifecycle.max_misses_confirmed
                              : cfg_.lifecycle.max_misses_tentative;
        if (trk.misses > limit) {
          trk.status = TrackStatus::Dead;
        }
      }
    }

    // 6. births from leftover detections
    for (const int det_idx : mr.unmatched_detections) {
      const Detection& det = frame.detections[det_idx];
      if (det.score < cfg_.lifecycle.min_birth_score) continue;
      Track trk;
      trk.id = next_id_++;
      trk.class_name = det.class_name;
      trk.state.t = frame.t;
      trk.state.x << det.box.center.x(), det.box.center.y(), det.box.velocity.x(),
          det.box.velocity.y();
      trk.state.P = Mat4::Zero();
      trk.state.P(0, 0) = trk.state.P(1, 1) = cfg_.p0_pos;
      trk.state.P(2, 2) = trk.state.P(3, 3) = cfg_.p0_vel;
      trk.box = det.box;
      trk.prev_center = trk.state.position();
      trk.hits = 1;
      trk.score = det.score;
      trk.status = trk.hits >= cfg_.lifecycle.confirm_hits ? TrackStatus::Confirmed
                                                           : TrackStatus::Tentative;
      tracks_.push_back(std::move(trk));
    }

    // 7. emit confirmed tracks that were supported this frame, then prune
    std::vector<TrackOutput> out;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      const Track& trk = tracks_[i];
      if (trk.status != TrackStatus::Confirmed) continue;
      const bool from_det = i < n_before ? det_hit[i] != 0 : true;
      const bool from_radar =
          i < n_before && radar_hit[i] && cfg_.lifecycle.radar_seen_counts_as_hit;
      if (!from_det && !from_radar) continue;
      TrackOutput rec;
      rec.frame_id = frame.frame_id;
      rec.track_id = trk.id;
      rec.class_name = trk.class_name;
      rec.box = trk.box;
      rec.velocity = trk.box.velocity;
      rec.score = trk.score;
      rec.provenance = from_det ? Provenance::Detection : Provenance::Radar;
      out.push_back(std::move(rec));
    }
    std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Dead; });
    return out;
  }

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  void absorb_detection(Track& trk, const Detection& det) {
    const double s = cfg_.box_smoothing;
    trk.box.extents = s * det.box.extents + (1.0 - s) * trk.box.extents;
    trk.box.center.z() = s * det.box.center.z() + (1.0 - s) * trk.box.center.z();
    trk.box.yaw = wrap_angle(trk.box.yaw + s * wrap_angle(det.box.yaw - trk.box.yaw));
    trk.score = s * det.score + (1.0 - s) * trk.score;
  }

  TrackerConfig cfg_;
  std::vector<Track> tracks_;
  std::int64_t next_id_ = 1;
  std::optional<double> last_t_;
};

/// Runs a whole scenario through a fresh tracker and concatenates the
/// per-frame outputs.
inline std::vector<TrackOutput> run_scene(const Scenario& scene, const TrackerConfig& cfg = {}) {
  Tracker tracker(cfg);
  std::vector<TrackOutput> out;
  for (const Frame& frame : scene.frames) {
    auto frame_out = tracker.step(frame);
    out.insert(out.end(), std::make_move_iterator(frame_out.begin()),
               std::make_move_iterator(frame_out.end()));
  }
  return out;
}

}  // namespace radarmot
