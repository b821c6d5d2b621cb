#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radarmot/radar.hpp"

namespace radarmot {

/// One detector output box with a confidence score.
struct Detection {
  Box3D box;
  double score = 0.0;
  std::string class_name;
};

/// One ground-truth box with a stable instance identity.
struct GtBox {
  std::string instance_id;
  Box3D box;
  std::string class_name;
};

/// One keyframe of input data. Radar arrives either as raw sweeps or as a
/// pre-aggregated point list, never both.
struct Frame {
  std::int64_t frame_id = 0;
  double t = 0.0;
  EgoState ego;
  std::vector<Detection> detections;
  std::optional<SweepBundle> sweeps;
  std::vector<RadarPoint> radar_points;
  std::vector<GtBox> gt;
};

struct Scenario {
  std::string name = "scene";
  std::map<std::string, std::string> conditions;
  std::map<std::string, Pose> sensors;  // sensor id -> mounting pose (sensor -> ego)
  std::vector<Frame> frames;
};

}  // namespace radarmot
