#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "radarmot/metrics.hpp"
#include "radarmot/simgen.hpp"
#include "radarmot/tracker.hpp"

namespace radarmot {

/// Everything a pipeline run can configure, with module defaults.
struct RunConfig {
  TrackerConfig tracker;
  EvalConfig eval;
  ScenarioConfig sim;
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& v, const std::string& key, long line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) {
    throw InvalidConfig("line " + std::to_string(line) + ": key '" + key +
                        "' needs a number, got '" + v + "'");
  }
  return out;
}

inline long to_long(const std::string& v, const std::string& key, long line) {
  const double d = to_double(v, key, line);
  const long out = static_cast<long>(d);
  if (static_cast<double>(out) != d) {
    throw InvalidConfig("line " + std::to_string(line) + ": key '" + key +
                        "' needs an integer, got '" + v + "'");
  }
  return out;
}

inline bool to_bool(const std::string& v, const std::string& key, long line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidConfig("line " + std::to_string(line) + ": key '" + key +
                      "' needs true/false, got '" + v + "'");
}

inline std::vector<double> to_doubles(const std::string& v, const std::string& key, long line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(to_double(trim(item), key, line));
  }
  return out;
}

inline ClassSpec& class_spec(ScenarioConfig& sim, const std::string& name) {
  for (ClassSpec& spec : sim.classes) {
    if (spec.name == name) return spec;
  }
  ClassSpec spec;
  spec.name = name;
  spec.count = 0;
  sim.classes.push_back(std::move(spec));
  return sim.classes.back();
}

}  // namespace config_detail

/// Applies one dotted-key assignment. Unknown keys are rejected so typos fail
/// loudly instead of running with silent defaults.
inline void apply_config_entry(RunConfig& rc, const std::string& key, const std::string& value,
                               long line = 0) {
  using config_detail::to_bool;
  using config_detail::to_double;
  using config_detail::to_doubles;
  using config_detail::to_long;
  const auto unknown = [&]() {
    throw InvalidConfig("line " + std::to_string(line) + ": unknown key '" + key + "'");
  };

  AssocConfig& as = rc.tracker.assoc;
  LifecycleConfig& lc = rc.tracker.lifecycle;
  ScenarioConfig& sim = rc.sim;

  if (key == "assoc.w_fwd") as.w_fwd = to_double(value, key, line);
  else if (key == "assoc.w_bwd") as.w_bwd = to_double(value, key, line);
  else if (key == "assoc.w_spd") as.w_spd = to_double(value, key, line);
  else if (key == "assoc.cost_gate") as.cost_gate = to_double(value, key, line);
  else if (key == "assoc.infl_update") as.infl_update = to_double(value, key, line);
  else if (key == "assoc.infl_predict") as.infl_predict = to_double(value, key, line);
  else if (key == "assoc.delta_v") as.delta_v = to_double(value, key, line);
  else if (key == "assoc.n_min") as.n_min = static_cast<int>(to_long(value, key, line));
  else if (key == "assoc.r_suppress") as.r_suppress = to_double(value, key, line);
  else if (key == "assoc.eps_speed") as.eps_speed = to_double(value, key, line);
  else if (key == "assoc.v_static") as.v_static = to_double(value, key, line);
  else if (key == "assoc.baseline_gate") as.baseline_gate = to_double(value, key, line);
  else if (key == "lifecycle.confirm_hits") lc.confirm_hits = static_cast<int>(to_long(value, key, line));
  else if (key == "lifecycle.max_misses_confirmed") lc.max_misses_confirmed = static_cast<int>(to_long(value, key, line));
  else if (key == "lifecycle.max_misses_tentative") lc.max_misses_tentative = static_cast<int>(to_long(value, key, line));
  else if (key == "lifecycle.radar_seen_counts_as_hit") lc.radar_seen_counts_as_hit = to_bool(value, key, line);
  else if (key == "lifecycle.min_birth_score") lc.min_birth_score = to_double(value, key, line);
  else if (key == "filter.q_accel") rc.tracker.model.q_accel = to_double(value, key, line);
  else if (key == "filter.sigma_radial") rc.tracker.sigma_radial = to_double(value, key, line);
  else if (key == "filter.sigma_det_pos") rc.tracker.sigma_det_pos = to_double(value, key, line);
  else if (key == "filter.p0_pos") rc.tracker.p0_pos = to_double(value, key, line);
  else if (key == "filter.p0_vel") rc.tracker.p0_vel = to_double(value, key, line);
  else if (key == "filter.box_smoothing") rc.tracker.box_smoothing = to_double(value, key, line);
  else if (key == "radar.r_exclude") rc.tracker.r_exclude = to_double(value, key, line);
  else if (key == "tracker.enable_radar_kf") rc.tracker.enable_radar_kf = to_bool(value, key, line);
  else if (key == "tracker.enable_radar_assoc") rc.tracker.enable_radar_assoc = to_bool(value, key, line);
  else if (key == "tracker.enable_cross_check") rc.tracker.enable_cross_check = to_bool(value, key, line);
  else if (key == "eval.n_recall") rc.eval.n_recall = static_cast<int>(to_long(value, key, line));
  else if (key == "eval.dist_gate") rc.eval.dist_gate = to_double(value, key, line);
  else if (key == "eval.default_range_cap") rc.eval.default_range_cap = to_double(value, key, line);
  else if (key == "eval.range_bins") rc.eval.range_bin_edges = to_doubles(value, key, line);
  else if (key.rfind("eval.range_cap.", 0) == 0) {
    rc.eval.class_range_caps[key.substr(15)] = to_double(value, key, line);
  }
  else if (key == "sim.seed") sim.seed = static_cast<std::uint64_t>(to_long(value, key, line));
  else if (key == "sim.name") sim.name = value;
  else if (key == "sim.duration_s") sim.duration_s = to_double(value, key, line);
  else if (key == "sim.keyframe_hz") sim.keyframe_hz = to_double(value, key, line);
  else if (key == "sim.sweeps_per_keyframe") sim.sweeps_per_keyframe = static_cast<int>(to_long(value, key, line));
  else if (key == "sim.lane_fraction") sim.lane_fraction = to_double(value, key, line);
  else if (key == "sim.turn_rate_max") sim.turn_rate_max = to_double(value, key, line);
  else if (key == "sim.spawn_min") sim.spawn_min = to_double(value, key, line);
  else if (key == "sim.spawn_max") sim.spawn_max = to_double(value, key, line);
  else if (key == "sim.ego_speed") sim.ego_speed = to_double(value, key, line);
  else if (key == "sim.ego_omega") sim.ego_omega = to_double(value, key, line);
  else if (key == "sim.sigma_pos") sim.sigma_pos = to_double(value, key, line);
  else if (key == "sim.sigma_vel") sim.sigma_vel = to_double(value, key, line);
  else if (key == "sim.sigma_yaw") sim.sigma_yaw = to_double(value, key, line);
  else if (key == "sim.dropout_base") sim.dropout_base = to_double(value, key, line);
  else if (key == "sim.dropout_per_100m") sim.dropout_per_100m = to_double(value, key, line);
  else if (key == "sim.score_base") sim.score_base = to_double(value, key, line);
  else if (key == "sim.score_per_100m") sim.score_per_100m = to_double(value, key, line);
  else if (key == "sim.score_sigma") sim.score_sigma = to_double(value, key, line);
  else if (key == "sim.radar_pts_near") sim.radar_pts_near = to_double(value, key, line);
  else if (key == "sim.radar_pts_far") sim.radar_pts_far = to_double(value, key, line);
  else if (key == "sim.radar_far_range") sim.radar_far_range = to_double(value, key, line);
  else if (key == "sim.radar_max_range") sim.radar_max_range = to_double(value, key, line);
  else if (key == "sim.radar_sigma_radial") sim.radar_sigma_radial = to_double(value, key, line);
  else if (key == "sim.radar_sigma_pos") sim.radar_sigma_pos = to_double(value, key, line);
  else if (key == "sim.clutter_density") sim.clutter_density = to_double(value, key, line);
  else if (key == "sim.clutter_radius") sim.clutter_radius = to_double(value, key, line);
  else if (key == "sim.clutter_sigma_radial") sim.clutter_sigma_radial = to_double(value, key, line);
  else if (key.rfind("sim.condition.", 0) == 0) {
    sim.conditions[key.substr(14)] = value;
  }
  else if (key.rfind("sim.class.", 0) == 0) {
    const std::string rest = key.substr(10);
    const auto dot = rest.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= rest.size()) unknown();
    ClassSpec& spec = config_detail::class_spec(sim, rest.substr(0, dot));
    const std::string field = rest.substr(dot + 1);
    if (field == "count") spec.count = static_cast<int>(to_long(value, key, line));
    else if (field == "speed_min") spec.speed_min = to_double(value, key, line);
    else if (field == "speed_max") spec.speed_max = to_double(value, key, line);
    else if (field == "extents") {
      const std::vector<double> e = to_doubles(value, key, line);
      if (e.size() != 3) {
        throw InvalidConfig("line " + std::to_string(line) + ": key '" + key +
                            "' needs three comma-separated extents");
      }
      spec.extents = Vec3(e[0], e[1], e[2]);
    }
    else unknown();
  }
  else unknown();
}

/// Parses flat dotted-key configuration text: one `key = value` per line,
/// '#' starts a comment, blank lines ignored, every key optional.
inline RunConfig parse_config(std::istream& is) {
  RunConfig rc;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    line_no += 1;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string text = config_detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": expected key=value, got '" +
                          text + "'");
    }
    const std::string key = config_detail::trim(text.substr(0, eq));
    const std::string value = config_detail::trim(text.substr(eq + 1));
    if (key.empty()) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": empty key");
    }
    apply_config_entry(rc, key, value, line_no);
  }
  return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  return parse_config(is);
}

}  // namespace radarmot
