#pragma once

#include <cstdint>
#include <string>

#include "radarmot/filter.hpp"
#include "radarmot/scene.hpp"

namespace radarmot {

enum class TrackStatus { Tentative, Confirmed, Dead };

/// Which sensor channel last supported a track's output.
enum class Provenance { Detection, Radar };

struct LifecycleConfig {
  int confirm_hits = 2;               // hits needed to confirm a tentative track
  int max_misses_confirmed = 3;       // confirmed tracks die past this many misses
  int max_misses_tentative = 1;       // tentative tracks die past this many misses
  bool radar_seen_counts_as_hit = true;
  double min_birth_score = 0.3;       // detections below this never start tracks
};

/// One tracked object with its lifecycle bookkeeping.
struct Track {
  std::int64_t id = 0;
  std::string class_name;
  KfState state;
  Box3D box;                          // shape, yaw and height carried beside the planar state
  Vec2 prev_center = Vec2::Zero();    // posterior center one keyframe ago
  int hits = 0;
  int misses = 0;
  TrackStatus status = TrackStatus::Tentative;
  double score = 0.0;
  Provenance last_seen_by = Provenance::Detection;

  void sync_box_from_state() {
    box.center.x() = state.x(0);
    box.center.y() = state.x(1);
    box.velocity = state.velocity();
  }
};

/// One emitted track box for one keyframe.
struct TrackOutput {
  std::int64_t frame_id = 0;
  std::int64_t track_id = 0;
  std::string class_name;
  Box3D box;
  Vec2 velocity = Vec2::Zero();
  double score = 0.0;
  Provenance provenance = Provenance::Detection;
};

}  // namespace radarmot
