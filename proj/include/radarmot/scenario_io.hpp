#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarmot/metrics.hpp"
#include "radarmot/scene.hpp"
#include "radarmot/track.hpp"

namespace radarmot {

inline constexpr int kSceneFormatVersion = 1;
inline constexpr int kResultsFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

namespace io_detail {

using json = nlohmann::ordered_json;

inline const json& field(const json& obj, const char* key, long line) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaMismatch(std::string("missing field '") + key + "'", line);
  }
  return *it;
}

inline double as_number(const json& v, const char* key, long line) {
  if (!v.is_number()) {
    throw SchemaMismatch(std::string("field '") + key + "' must be a number", line);
  }
  return v.get<double>();
}

inline double num_field(const json& obj, const char* key, long line) {
  return as_number(field(obj, key, line), key, line);
}

inline std::string str_field(const json& obj, const char* key, long line) {
  const json& v = field(obj, key, line);
  if (!v.is_string()) {
    throw SchemaMismatch(std::string("field '") + key + "' must be a string", line);
  }
  return v.get<std::string>();
}

inline Vec3 vec3_field(const json& obj, const char* key, long line) {
  const json& v = field(obj, key, line);
  if (!v.is_array() || v.size() != 3) {
    throw SchemaMismatch(std::string("field '") + key + "' must be a 3-array", line);
  }
  return Vec3(as_number(v[0], key, line), as_number(v[1], key, line),
              as_number(v[2], key, line));
}

inline Vec2 vec2_field(const json& obj, const char* key, long line) {
  const json& v = field(obj, key, line);
  if (!v.is_array() || v.size() != 2) {
    throw SchemaMismatch(std::string("field '") + key + "' must be a 2-array", line);
  }
  return Vec2(as_number(v[0], key, line), as_number(v[1], key, line));
}

inline json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
inline json vec2_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

inline json mat3_json(const Mat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out.push_back(m(r, c));
    }
  }
  return out;
}

inline Mat3 mat3_field(const json& obj, const char* key, long line) {
  const json& v = field(obj, key, line);
  if (!v.is_array() || v.size() != 9) {
    throw SchemaMismatch(std::string("field '") + key + "' must be a row-major 9-array", line);
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m(r, c) = as_number(v[static_cast<std::size_t>(3 * r + c)], key, line);
    }
  }
  return m;
}

inline json pose_json(const Pose& p) {
  return json{{"rotation", mat3_json(p.rotation)}, {"translation", vec3_json(p.translation)}};
}

inline Pose pose_field(const json& obj, const char* key, long line) {
  const json& v = field(obj, key, line);
  if (!v.is_object()) {
    throw SchemaMismatch(std::string("field '") + key + "' must be a pose object", line);
  }
  Pose p;
  p.rotation = mat3_field(v, "rotation", line);
  p.translation = vec3_field(v, "translation", line);
  return p;
}

inline json ego_json(const EgoState& e) {
  return json{{"pose", pose_json(e.pose)},
              {"velocity", vec3_json(e.v_ego)},
              {"omega", vec3_json(e.omega_ego)},
              {"rotation_center", vec3_json(e.rotation_center)}};
}

inline EgoState ego_field(const json& obj, const char* key, long line) {
  const json& v = field(obj, key, line);
  if (!v.is_object()) {
    throw SchemaMismatch(std::string("field '") + key + "' must be an ego object", line);
  }
  EgoState e;
  e.pose = pose_field(v, "pose", line);
  if (v.contains("velocity")) e.v_ego = vec3_field(v, "velocity", line);
  if (v.contains("omega")) e.omega_ego = vec3_field(v, "omega", line);
  if (v.contains("rotation_center")) e.rotation_center = vec3_field(v, "rotation_center", line);
  return e;
}

inline json box_json(const Box3D& b) {
  return json{{"center", vec3_json(b.center)},
              {"extents", vec3_json(b.extents)},
              {"yaw", b.yaw},
              {"velocity", vec2_json(b.velocity)}};
}

inline Box3D box_fields(const json& obj, long line) {
  Box3D b;
  b.center = vec3_field(obj, "center", line);
  b.extents = vec3_field(obj, "extents", line);
  b.yaw = num_field(obj, "yaw", line);
  b.velocity = vec2_field(obj, "velocity", line);
  return b;
}

}  // namespace io_detail

// --- scene files -----------------------------------------------------------

inline void write_scene(std::ostream& os, const Scenario& scene) {
  using io_detail::json;
  json header{{"format", "radarmot-scene"},
              {"version", kSceneFormatVersion},
              {"name", scene.name}};
  if (!scene.conditions.empty()) {
    header["conditions"] = scene.conditions;
  }
  if (!scene.sensors.empty()) {
    json sensors = json::object();
    for (const auto& [id, pose] : scene.sensors) {
      sensors[id] = io_detail::pose_json(pose);
    }
    header["sensors"] = sensors;
  }
  os << header.dump() << '\n';

  for (const Frame& f : scene.frames) {
    json rec{{"type", "frame"}, {"frame_id", f.frame_id}, {"t", f.t},
             {"ego", io_detail::ego_json(f.ego)}};
    json dets = json::array();
    for (const Detection& d : f.detections) {
      json jd = io_detail::box_json(d.box);
      jd["score"] = d.score;
      jd["class"] = d.class_name;
      dets.push_back(std::move(jd));
    }
    rec["detections"] = std::move(dets);
    if (f.sweeps) {
      json sweeps = json::array();
      for (const Sweep& sw : f.sweeps->sweeps) {
        json js{{"t", sw.t}, {"ego", io_detail::ego_json(sw.ego)}};
        json pts = json::array();
        for (const RawRadarReturn& r : sw.points) {
          pts.push_back(json{{"sensor", r.sensor_id},
                             {"p_sensor", io_detail::vec3_json(r.p_sensor)},
                             {"v_rel", io_detail::vec3_json(r.v_rel)}});
        }
        js["points"] = std::move(pts);
        sweeps.push_back(std::move(js));
      }
      rec["radar_sweeps"] = std::move(sweeps);
    }
    if (!f.radar_points.empty()) {
      json pts = json::array();
      for (const RadarPoint& p : f.radar_points) {
        pts.push_back(json{{"sensor", p.sensor_id},
                           {"t_sweep", p.t_sweep},
                           {"p_sensor", io_detail::vec3_json(p.p_sensor)},
                           {"p_global", io_detail::vec3_json(p.p_global)},
                           {"v_rel", io_detail::vec3_json(p.v_rel)},
                           {"v_comp", io_detail::vec3_json(p.v_comp)},
                           {"v_radial", p.v_radial},
                           {"sensor_pose", io_detail::pose_json(p.sensor_pose)}});
      }
      rec["radar_points"] = std::move(pts);
    }
    if (!f.gt.empty()) {
      json gts = json::array();
      for (const GtBox& g : f.gt) {
        json jg{{"instance", g.instance_id}};
        json jb = io_detail::box_json(g.box);
        jg.update(jb);
        jg["class"] = g.class_name;
        gts.push_back(std::move(jg));
      }
      rec["gt"] = std::move(gts);
    }
    os << rec.dump() << '\n';
  }
}

inline void write_scene(const std::string& path, const Scenario& scene) {
  std::ofstream os(path);
  if (!os) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_scene(os, scene);
  os.flush();
  if (!os) {
    throw IoError("failed while writing '" + path + "'");
  }
}

inline Scenario parse_scene(std::istream& is) {
  using io_detail::json;
  Scenario scene;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  bool have_prev_ego = false;
  EgoState prev_ego;
  double prev_t = 0.0;
  std::set<std::int64_t> frame_ids;

  while (std::getline(is, line)) {
    line_no += 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw SchemaMismatch("not a JSON object record", line_no);
    }

    if (!header_seen) {
      const std::string format = io_detail::str_field(rec, "format", line_no);
      if (format != "radarmot-scene") {
        throw SchemaMismatch("expected a radarmot-scene header, got format '" + format + "'",
                             line_no);
      }
      const double version = io_detail::num_field(rec, "version", line_no);
      if (version != kSceneFormatVersion) {
        std::ostringstream msg;
        msg << "scene format version " << version << " is not supported (expected "
            << kSceneFormatVersion << ")";
        throw VersionUnsupported(msg.str());
      }
      if (rec.contains("name")) scene.name = io_detail::str_field(rec, "name", line_no);
      if (rec.contains("conditions")) {
        for (const auto& [k, v] : rec["conditions"].items()) {
          if (!v.is_string()) {
            throw SchemaMismatch("condition values must be strings", line_no);
          }
          scene.conditions[k] = v.get<std::string>();
        }
      }
      if (rec.contains("sensors")) {
        for (const auto& [k, v] : rec["sensors"].items()) {
          if (!v.is_object()) {
            throw SchemaMismatch("sensor mounting must be a pose object", line_no);
          }
          Pose p;
          p.rotation = io_detail::mat3_field(v, "rotation", line_no);
          p.translation = io_detail::vec3_field(v, "translation", line_no);
          scene.sensors[k] = p;
        }
      }
      header_seen = true;
      continue;
    }

    const std::string type = io_detail::str_field(rec, "type", line_no);
    if (type != "frame") {
      throw SchemaMismatch("unknown record type '" + type + "'", line_no);
    }
    Frame frame;
    const double fid = io_detail::num_field(rec, "frame_id", line_no);
    frame.frame_id = static_cast<std::int64_t>(fid);
    frame.t = io_detail::num_field(rec, "t", line_no);
    frame.ego = io_detail::ego_field(rec, "ego", line_no);
    if (!frame_ids.insert(frame.frame_id).second) {
      throw SchemaMismatch("duplicate frame_id " + std::to_string(frame.frame_id), line_no);
    }
    if (!scene.frames.empty() && !(frame.t > scene.frames.back().t)) {
      std::ostringstream msg;
      msg << "line " << line_no << ": keyframe time " << frame.t << " does not increase past "
          << scene.frames.back().t;
      throw NonMonotonicTime(msg.str());
    }

    if (rec.contains("detections")) {
      const json& dets = rec["detections"];
      if (!dets.is_array()) throw SchemaMismatch("'detections' must be an array", line_no);
      for (const json& jd : dets) {
        Detection d;
        d.box = io_detail::box_fields(jd, line_no);
        d.score = io_detail::num_field(jd, "score", line_no);
        d.class_name = io_detail::str_field(jd, "class", line_no);
        frame.detections.push_back(std::move(d));
      }
    }

    const bool has_sweeps = rec.contains("radar_sweeps");
    const bool has_points = rec.contains("radar_points");
    if (has_sweeps && has_points) {
      throw SchemaMismatch("frame carries both radar_sweeps and radar_points", line_no);
    }
    if (has_sweeps) {
      const json& sweeps = rec["radar_sweeps"];
      if (!sweeps.is_array()) throw SchemaMismatch("'radar_sweeps' must be an array", line_no);
      SweepBundle bundle;
      bundle.t_keyframe = frame.t;
      bundle.ego_keyframe = frame.ego;
      for (const json& js : sweeps) {
        Sweep sw;
        sw.t = io_detail::num_field(js, "t", line_no);
        if (sw.t > frame.t) {
          throw SchemaMismatch("sweep time past its keyframe", line_no);
        }
        if (!bundle.sweeps.empty() && sw.t < bundle.sweeps.back().t) {
          throw SchemaMismatch("sweeps must be time-sorted", line_no);
        }
        if (js.contains("ego")) {
          sw.ego = io_detail::ego_field(js, "ego", line_no);
        } else if (have_prev_ego) {
          sw.ego = interpolate_ego(prev_ego, prev_t, frame.ego, frame.t, sw.t);
        } else {
          sw.ego = frame.ego;
        }
        if (js.contains("points")) {
          const json& pts = js["points"];
          if (!pts.is_array()) throw SchemaMismatch("sweep 'points' must be an array", line_no);
          for (const json& jp : pts) {
            RawRadarReturn raw;
            raw.sensor_id = io_detail::str_field(jp, "sensor", line_no);
            raw.p_sensor = io_detail::vec3_field(jp, "p_sensor", line_no);
            raw.v_rel = io_detail::vec3_field(jp, "v_rel", line_no);
            const auto it = scene.sensors.find(raw.sensor_id);
            if (it == scene.sensors.end()) {
              throw SchemaMismatch("sweep return names unknown sensor '" + raw.sensor_id + "'",
                                   line_no);
            }
            raw.sensor_pose = sw.ego.pose * it->second;
            sw.points.push_back(std::move(raw));
          }
        }
        bundle.sweeps.push_back(std::move(sw));
      }
      frame.sweeps = std::move(bundle);
    }
    if (has_points) {
      const json& pts = rec["radar_points"];
      if (!pts.is_array()) throw SchemaMismatch("'radar_points' must be an array", line_no);
      for (const json& jp : pts) {
        RadarPoint p;
        p.sensor_id = io_detail::str_field(jp, "sensor", line_no);
        p.t_sweep = io_detail::num_field(jp, "t_sweep", line_no);
        p.p_sensor = io_detail::vec3_field(jp, "p_sensor", line_no);
        p.p_global = io_detail::vec3_field(jp, "p_global", line_no);
        p.v_rel = io_detail::vec3_field(jp, "v_rel", line_no);
        p.v_comp = io_detail::vec3_field(jp, "v_comp", line_no);
        p.v_radial = io_detail::num_field(jp, "v_radial", line_no);
        p.sensor_pose = io_detail::pose_field(jp, "sensor_pose", line_no);
        p.los = bearing(p.p_sensor);
        frame.radar_points.push_back(std::move(p));
      }
    }

    if (rec.contains("gt")) {
      const json& gts = rec["gt"];
      if (!gts.is_array()) throw SchemaMismatch("'gt' must be an array", line_no);
      for (const json& jg : gts) {
        GtBox g;
        g.instance_id = io_detail::str_field(jg, "instance", line_no);
        g.box = io_detail::box_fields(jg, line_no);
        g.class_name = io_detail::str_field(jg, "class", line_no);
        frame.gt.push_back(std::move(g));
      }
    }

    prev_ego = frame.ego;
    prev_t = frame.t;
    have_prev_ego = true;
    scene.frames.push_back(std::move(frame));
  }
  if (!header_seen) {
    throw SchemaMismatch("file has no header record", 1);
  }
  return scene;
}

inline Scenario parse_scene(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  return parse_scene(is);
}

// --- results files ---------------------------------------------------------

inline void write_results(std::ostream& os, const std::vector<TrackOutput>& outputs) {
  using io_detail::json;
  os << json{{"format", "radarmot-results"}, {"version", kResultsFormatVersion}}.dump() << '\n';
  for (const TrackOutput& o : outputs) {
    json rec{{"type", "output"},
             {"frame_id", o.frame_id},
             {"track_id", o.track_id},
             {"class", o.class_name}};
    rec.update(io_detail::box_json(o.box));
    rec["velocity"] = io_detail::vec2_json(o.velocity);
    rec["score"] = o.score;
    rec["provenance"] = o.provenance == Provenance::Radar ? "radar" : "detection";
    os << rec.dump() << '\n';
  }
}

inline void write_results(const std::string& path, const std::vector<TrackOutput>& outputs) {
  std::ofstream os(path);
  if (!os) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_results(os, outputs);
  os.flush();
  if (!os) {
    throw IoError("failed while writing '" + path + "'");
  }
}

inline std::vector<TrackOutput> parse_results(std::istream& is) {
  using io_detail::json;
  std::vector<TrackOutput> out;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    line_no += 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw SchemaMismatch("not a JSON object record", line_no);
    }
    if (!header_seen) {
      const std::string format = io_detail::str_field(rec, "format", line_no);
      if (format != "radarmot-results") {
        throw SchemaMismatch("expected a radarmot-results header, got format '" + format + "'",
                             line_no);
      }
      const double version = io_detail::num_field(rec, "version", line_no);
      if (version != kResultsFormatVersion) {
        std::ostringstream msg;
        msg << "results format version " << version << " is not supported (expected "
            << kResultsFormatVersion << ")";
        throw VersionUnsupported(msg.str());
      }
      header_seen = true;
      continue;
    }
    const std::string type = io_detail::str_field(rec, "type", line_no);
    if (type != "output") {
      throw SchemaMismatch("unknown record type '" + type + "'", line_no);
    }
    TrackOutput o;
    o.frame_id = static_cast<std::int64_t>(io_detail::num_field(rec, "frame_id", line_no));
    o.track_id = static_cast<std::int64_t>(io_detail::num_field(rec, "track_id", line_no));
    o.class_name = io_detail::str_field(rec, "class", line_no);
    o.box = io_detail::box_fields(rec, line_no);
    o.velocity = io_detail::vec2_field(rec, "velocity", line_no);
    o.box.velocity = o.velocity;
    o.score = io_detail::num_field(rec, "score", line_no);
    const std::string prov = io_detail::str_field(rec, "provenance", line_no);
    if (prov == "radar") {
      o.provenance = Provenance::Radar;
    } else if (prov == "detection") {
      o.provenance = Provenance::Detection;
    } else {
      throw SchemaMismatch("provenance must be 'detection' or 'radar'", line_no);
    }
    out.push_back(std::move(o));
  }
  if (!header_seen) {
    throw SchemaMismatch("file has no header record", 1);
  }
  return out;
}

inline std::vector<TrackOutput> parse_results(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  return parse_results(is);
}

// --- evaluation reports ----------------------------------------------------

namespace io_detail {

inline json counts_json(const FrameCounts& c) {
  return json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"ids", c.ids}};
}

inline json bin_json(const BinSummary& b) {
  json out{{"label", b.label}, {"gt", b.gt}, {"amota", b.amota}};
  out.update(counts_json(b.counts));
  return out;
}

}  // namespace io_detail

inline io_detail::json report_json(const MetricsReport& report) {
  using io_detail::json;
  json out{{"format", "radarmot-report"},
           {"version", kReportFormatVersion},
           {"n_recall", report.n_recall},
           {"dist_gate", report.dist_gate},
           {"operating_point", "best-motar-per-class, ties to higher recall"},
           {"amota", report.amota_value}};
  out.update(io_detail::counts_json(report.totals));
  json classes = json::array();
  for (const ClassReport& cr : report.classes) {
    json jc{{"class", cr.class_name}, {"gt", cr.gt_count}, {"amota", cr.amota_value}};
    jc.update(io_detail::counts_json(cr.best() ? cr.best()->counts : FrameCounts{}));
    if (cr.best()) {
      jc["best_recall_target"] = cr.best()->recall_target;
      jc["best_threshold"] = cr.best()->threshold;
      jc["best_recall"] = cr.best()->recall;
      jc["best_motar"] = cr.best()->motar_value;
    }
    json pts = json::array();
    for (const OperatingPoint& p : cr.points) {
      pts.push_back(json{{"recall_target", p.recall_target},
                         {"achieved", p.achieved},
                         {"motar", p.motar_value}});
    }
    jc["motar_by_recall"] = std::move(pts);
    if (!cr.bins.empty()) {
      json bins = json::array();
      for (const BinSummary& b : cr.bins) bins.push_back(io_detail::bin_json(b));
      jc["bins"] = std::move(bins);
    }
    classes.push_back(std::move(jc));
  }
  out["classes"] = std::move(classes);
  if (!report.bins.empty()) {
    json bins = json::array();
    for (const BinSummary& b : report.bins) bins.push_back(io_detail::bin_json(b));
    out["bins"] = std::move(bins);
  }
  if (!report.conditions.empty()) {
    json conds = json::array();
    for (const ConditionSummary& c : report.conditions) {
      conds.push_back(json{{"group", c.group},
                           {"value", c.value},
                           {"scenes", c.scene_count},
                           {"amota", c.amota_value},
                           {"ids", c.ids}});
    }
    out["conditions"] = std::move(conds);
  }
  return out;
}

inline void write_report_text(std::ostream& os, const MetricsReport& report) {
  char buf[256];
  os << "radarmot evaluation report\n";
  os << "==========================\n";
  std::snprintf(buf, sizeof(buf), "recall points: %d    distance gate: %.2f m\n",
                report.n_recall, report.dist_gate);
  os << buf;
  os << "counts reported at the operating point with the highest MOTAR per class"
        " (ties to higher recall)\n\n";
  std::snprintf(buf, sizeof(buf),
                "overall   AMOTA%% %6.1f    TP %7ld    FP %7ld    FN %7ld    IDS %6ld\n\n",
                100.0 * report.amota_value, report.totals.tp, report.totals.fp,
                report.totals.fn, report.totals.ids);
  os << buf;

  os << "class                 AMOTA%       TP       FP       FN      IDS       GT\n";
  os << "-------------------------------------------------------------------------\n";
  for (const ClassReport& cr : report.classes) {
    const FrameCounts c = cr.best() ? cr.best()->counts : FrameCounts{};
    std::snprintf(buf, sizeof(buf), "%-20s %7.1f %8ld %8ld %8ld %8ld %8ld\n",
                  cr.class_name.c_str(), 100.0 * cr.amota_value, c.tp, c.fp, c.fn, c.ids,
                  cr.gt_count);
    os << buf;
  }

  if (!report.bins.empty()) {
    os << "\nrange bin (m)         AMOTA%       TP       FP       FN      IDS       GT\n";
    os << "-------------------------------------------------------------------------\n";
    for (const BinSummary& b : report.bins) {
      std::snprintf(buf, sizeof(buf), "%-20s %7.1f %8ld %8ld %8ld %8ld %8ld\n",
                    b.label.c_str(), 100.0 * b.amota, b.counts.tp, b.counts.fp, b.counts.fn,
                    b.counts.ids, b.gt);
      os << buf;
    }
  }

  if (!report.conditions.empty()) {
    os << "\ncondition                      scenes   AMOTA%      IDS\n";
    os << "-------------------------------------------------------\n";
    for (const ConditionSummary& c : report.conditions) {
      const std::string tag = c.group + "=" + c.value;
      std::snprintf(buf, sizeof(buf), "%-30s %6d %8.1f %8ld\n", tag.c_str(), c.scene_count,
                    100.0 * c.amota_value, c.ids);
      os << buf;
    }
  }
}

/// Writes the human-readable table to `path` and the machine-readable summary
/// to `path` + ".json".
inline void write_report(const std::string& path, const MetricsReport& report) {
  {
    std::ofstream os(path);
    if (!os) {
      throw IoError("cannot open '" + path + "' for writing");
    }
    write_report_text(os, report);
    os.flush();
    if (!os) {
      throw IoError("failed while writing '" + path + "'");
    }
  }
  const std::string json_path = path + ".json";
  std::ofstream os(json_path);
  if (!os) {
    throw IoError("cannot open '" + json_path + "' for writing");
  }
  os << report_json(report).dump(2) << '\n';
  os.flush();
  if (!os) {
    throw IoError("failed while writing '" + json_path + "'");
  }
}

}  // namespace radarmot
