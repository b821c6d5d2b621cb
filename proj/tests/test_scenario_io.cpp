#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include <radarmot/config.hpp>
#include <radarmot/scenario_io.hpp>
#include <radarmot/simgen.hpp>
#include <radarmot/tracker.hpp>

namespace rm = radarmot;
using rm::Vec2;
using rm::Vec3;

namespace {

std::string fixture(const std::string& name) {
  return std::string(RADARMOT_FIXTURES) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  EXPECT_TRUE(is.good()) << "cannot read " << path;
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string scene_bytes(const rm::Scenario& scene) {
  std::ostringstream os;
  rm::write_scene(os, scene);
  return os.str();
}

std::string results_bytes(const std::vector<rm::TrackOutput>& outputs) {
  std::ostringstream os;
  rm::write_results(os, outputs);
  return os.str();
}

rm::Scenario parse_scene_str(const std::string& text) {
  std::istringstream is(text);
  return rm::parse_scene(is);
}

/// Scenario touching every serialized feature: conditions, two sensors, raw
/// sweeps with returns, pre-aggregated points, detections and ground truth.
rm::Scenario rich_scene() {
  rm::Scenario s;
  s.name = "rich";
  s.conditions = {{"time", "night"}, {"weather", "rain"}};
  s.sensors["radar_front"] = rm::Pose{rm::Mat3::Identity(), Vec3(3.0, 0.0, 1.0)};
  s.sensors["radar_rear"] =
      rm::Pose{rm::yaw_rotation(std::numbers::pi), Vec3(-1.0, 0.0, 1.0)};

  rm::Frame f0;
  f0.frame_id = 0;
  f0.t = 0.0;
  f0.ego.pose = rm::Pose::from_yaw(0.1, Vec3(1.25, -0.5, 0.0));
  f0.ego.v_ego = Vec3(9.87654321, 0.123, 0.0);
  f0.ego.omega_ego = Vec3(0.0, 0.0, 0.25);
  f0.ego.rotation_center = Vec3(-1.5, 0.0, 0.0);
  rm::Detection det;
  det.box.center = Vec3(20.123456789, -3.5, 0.9);
  det.box.extents = Vec3(4.5, 2.0, 1.8);
  det.box.yaw = 0.7853981633974483;
  det.box.velocity = Vec2(7.25, -0.125);
  det.score = 0.875;
  det.class_name = "car";
  f0.detections.push_back(det);
  rm::SweepBundle bundle;
  bundle.t_keyframe = 0.0;
  bundle.ego_keyframe = f0.ego;
  for (int sw = 0; sw < 2; ++sw) {
    rm::Sweep sweep;
    sweep.t = -0.25 + 0.25 * sw;
    sweep.ego = f0.ego;
    rm::RawRadarReturn raw;
    raw.sensor_id = sw == 0 ? "radar_rear" : "radar_front";
    raw.p_sensor = Vec3(15.0 + sw, 0.5, -0.25);
    raw.v_rel = Vec3(-3.125, 0.0625, 0.0);
    raw.sensor_pose = sweep.ego.pose * s.sensors[raw.sensor_id];
    sweep.points.push_back(raw);
    bundle.sweeps.push_back(std::move(sweep));
  }
  f0.sweeps = std::move(bundle);
  rm::GtBox g;
  g.instance_id = "car-0";
  g.box = det.box;
  g.class_name = "car";
  f0.gt.push_back(g);
  s.frames.push_back(std::move(f0));

  rm::Frame f1;
  f1.frame_id = 1;
  f1.t = 0.5;
  f1.ego = s.frames[0].ego;
  f1.ego.pose.translation += Vec3(5.0, 0.0, 0.0);
  rm::RadarPoint p;
  p.sensor_id = "radar_front";
  p.t_sweep = 0.375;
  p.p_sensor = Vec3(12.5, -1.25, -0.5);
  p.los = rm::bearing(p.p_sensor);
  p.sensor_pose = f1.ego.pose * s.sensors["radar_front"];
  p.p_global = rm::transform_point(p.sensor_pose, p.p_sensor);
  p.v_rel = Vec3(-8.5, 0.25, 0.0);
  p.v_comp = Vec3(1.5, 0.25, 0.0);
  p.v_radial = 1.375;
  f1.radar_points.push_back(p);
  g.box.center += Vec3(3.625, 0.0, 0.0);
  f1.gt.push_back(g);
  s.frames.push_back(std::move(f1));
  return s;
}

template <class E>
void expect_parse_error(const std::string& path, const std::vector<std::string>& needles) {
  try {
    if (path.size() >= 8 && path.substr(path.size() - 8) == ".results") {
      rm::parse_results(path);
    } else {
      rm::parse_scene(path);
    }
    FAIL() << path << " parsed without raising";
  } catch (const E& e) {
    const std::string what = e.what();
    for (const std::string& n : needles) {
      EXPECT_NE(what.find(n), std::string::npos)
          << path << ": message '" << what << "' lacks '" << n << "'";
    }
  } catch (const std::exception& e) {
    FAIL() << path << " raised the wrong type: " << e.what();
  }
}

}  // namespace

TEST(SceneIo, RoundTripPreservesEveryField) {
  const rm::Scenario s = rich_scene();
  const rm::Scenario r = parse_scene_str(scene_bytes(s));

  EXPECT_EQ(r.name, "rich");
  EXPECT_EQ(r.conditions, s.conditions);
  ASSERT_EQ(r.sensors.size(), 2u);
  EXPECT_EQ((r.sensors.at("radar_rear").translation - Vec3(-1.0, 0.0, 1.0)).norm(), 0.0);
  ASSERT_EQ(r.frames.size(), 2u);

  const rm::Frame& f0 = r.frames[0];
  EXPECT_EQ(f0.frame_id, 0);
  EXPECT_EQ((f0.ego.pose.translation - s.frames[0].ego.pose.translation).norm(), 0.0);
  EXPECT_EQ((f0.ego.pose.rotation - s.frames[0].ego.pose.rotation).norm(), 0.0);
  EXPECT_EQ((f0.ego.v_ego - s.frames[0].ego.v_ego).norm(), 0.0);
  EXPECT_EQ((f0.ego.rotation_center - s.frames[0].ego.rotation_center).norm(), 0.0);
  ASSERT_EQ(f0.detections.size(), 1u);
  EXPECT_EQ(f0.detections[0].box.yaw, s.frames[0].detections[0].box.yaw);
  EXPECT_EQ(f0.detections[0].score, 0.875);
  EXPECT_EQ(f0.detections[0].class_name, "car");
  ASSERT_TRUE(f0.sweeps.has_value());
  ASSERT_EQ(f0.sweeps->sweeps.size(), 2u);
  EXPECT_EQ(f0.sweeps->t_keyframe, 0.0);
  const rm::RawRadarReturn& raw = f0.sweeps->sweeps[0].points.at(0);
  EXPECT_EQ(raw.sensor_id, "radar_rear");
  EXPECT_EQ((raw.p_sensor - Vec3(15.0, 0.5, -0.25)).norm(), 0.0);
  // mounting is reattached from the header on load
  EXPECT_EQ((raw.sensor_pose.translation -
             s.frames[0].sweeps->sweeps[0].points[0].sensor_pose.translation)
                .norm(),
            0.0);
  ASSERT_EQ(f0.gt.size(), 1u);
  EXPECT_EQ(f0.gt[0].instance_id, "car-0");

  const rm::Frame& f1 = r.frames[1];
  ASSERT_EQ(f1.radar_points.size(), 1u);
  const rm::RadarPoint& p = f1.radar_points[0];
  EXPECT_EQ(p.t_sweep, 0.375);
  EXPECT_EQ(p.v_radial, 1.375);
  EXPECT_EQ((p.p_global - s.frames[1].radar_points[0].p_global).norm(), 0.0);
  EXPECT_EQ((p.v_comp - Vec3(1.5, 0.25, 0.0)).norm(), 0.0);
  // the line of sight is not stored; it is rebuilt from the sensor-frame point
  EXPECT_EQ((p.los - rm::bearing(p.p_sensor)).norm(), 0.0);
}

TEST(SceneIo, WriterOutputIsByteStableThroughReparse) {
  const std::string once = scene_bytes(rich_scene());
  EXPECT_EQ(once, scene_bytes(parse_scene_str(once)));

  rm::ScenarioConfig cfg;
  cfg.seed = 9;
  cfg.duration_s = 1.5;
  const std::string sim_once = scene_bytes(rm::generate(cfg));
  EXPECT_EQ(sim_once, scene_bytes(parse_scene_str(sim_once)));
}

TEST(ResultsIo, RoundTripPreservesOutputs) {
  std::vector<rm::TrackOutput> outputs;
  rm::TrackOutput a;
  a.frame_id = 0;
  a.track_id = 4;
  a.class_name = "car";
  a.box.center = Vec3(12.0625, -3.5, 0.9);
  a.box.extents = Vec3(4.5, 2.0, 1.8);
  a.box.yaw = -1.125;
  a.velocity = Vec2(6.25, 0.5);
  a.box.velocity = a.velocity;
  a.score = 0.8125;
  a.provenance = rm::Provenance::Detection;
  rm::TrackOutput b = a;
  b.frame_id = 1;
  b.score = 0.75;
  b.provenance = rm::Provenance::Radar;
  outputs.push_back(a);
  outputs.push_back(b);

  const std::string once = results_bytes(outputs);
  std::istringstream is(once);
  const std::vector<rm::TrackOutput> back = rm::parse_results(is);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].track_id, 4);
  EXPECT_EQ(back[0].provenance, rm::Provenance::Detection);
  EXPECT_EQ(back[1].provenance, rm::Provenance::Radar);
  EXPECT_EQ(back[1].score, 0.75);
  EXPECT_EQ((back[0].box.center - a.box.center).norm(), 0.0);
  EXPECT_EQ((back[0].velocity - a.velocity).norm(), 0.0);
  EXPECT_EQ((back[0].box.velocity - a.velocity).norm(), 0.0);
  EXPECT_EQ(once, results_bytes(back));
}

TEST(SceneIo, SweepEgoInterpolatesBetweenKeyframes) {
  const std::string text =
      "{\"format\":\"radarmot-scene\",\"version\":1}\n"
      "{\"type\":\"frame\",\"frame_id\":0,\"t\":0.0,\"ego\":{\"pose\":{\"rotation\":"
      "[1,0,0,0,1,0,0,0,1],\"translation\":[0,0,0]},\"velocity\":[10,0,0]},"
      "\"radar_sweeps\":[{\"t\":0.0}]}\n"
      "{\"type\":\"frame\",\"frame_id\":1,\"t\":1.0,\"ego\":{\"pose\":{\"rotation\":"
      "[1,0,0,0,1,0,0,0,1],\"translation\":[10,0,0]},\"velocity\":[10,0,0]},"
      "\"radar_sweeps\":[{\"t\":0.5},{\"t\":1.0}]}\n";
  const rm::Scenario s = parse_scene_str(text);
  ASSERT_EQ(s.frames.size(), 2u);
  // no previous keyframe: the sweep inherits the frame ego
  EXPECT_EQ(s.frames[0].sweeps->sweeps[0].ego.pose.translation.norm(), 0.0);
  // halfway in time lands halfway in space
  const rm::Sweep& mid = s.frames[1].sweeps->sweeps[0];
  EXPECT_TRUE(mid.ego.pose.translation.isApprox(Vec3(5.0, 0.0, 0.0), 1e-12));
  EXPECT_TRUE(s.frames[1].sweeps->sweeps[1].ego.pose.translation.isApprox(
      Vec3(10.0, 0.0, 0.0), 1e-12));
}

TEST(SceneIo, RejectsSweepsAfterTheKeyframe) {
  const std::string text =
      "{\"format\":\"radarmot-scene\",\"version\":1}\n"
      "{\"type\":\"frame\",\"frame_id\":0,\"t\":0.5,\"ego\":{\"pose\":{\"rotation\":"
      "[1,0,0,0,1,0,0,0,1],\"translation\":[0,0,0]}},\"radar_sweeps\":[{\"t\":0.6}]}\n";
  EXPECT_THROW(parse_scene_str(text), rm::SchemaMismatch);
}

TEST(SceneIo, RejectsUnsortedSweeps) {
  const std::string text =
      "{\"format\":\"radarmot-scene\",\"version\":1}\n"
      "{\"type\":\"frame\",\"frame_id\":0,\"t\":0.5,\"ego\":{\"pose\":{\"rotation\":"
      "[1,0,0,0,1,0,0,0,1],\"translation\":[0,0,0]}},"
      "\"radar_sweeps\":[{\"t\":0.4},{\"t\":0.2}]}\n";
  EXPECT_THROW(parse_scene_str(text), rm::SchemaMismatch);
}

TEST(SceneIo, EmptyInputLacksAHeader) {
  std::istringstream empty("");
  EXPECT_THROW(rm::parse_scene(empty), rm::SchemaMismatch);
  std::istringstream blank("  \n\t\n");
  EXPECT_THROW(rm::parse_scene(blank), rm::SchemaMismatch);
}

TEST(SceneIo, MalformedFixturesRaiseDocumentedErrors) {
  expect_parse_error<rm::SchemaMismatch>(fixture("bad_header.scene"),
                                         {"line 1", "radarmot-scene"});
  expect_parse_error<rm::VersionUnsupported>(fixture("bad_version.scene"), {"99"});
  expect_parse_error<rm::NonMonotonicTime>(fixture("non_monotonic.scene"), {"line 3"});
  expect_parse_error<rm::SchemaMismatch>(fixture("missing_field.scene"),
                                         {"line 2", "center"});
  expect_parse_error<rm::SchemaMismatch>(fixture("both_radar.scene"), {"line 2"});
  expect_parse_error<rm::SchemaMismatch>(fixture("dup_frame.scene"),
                                         {"line 3", "duplicate"});
  expect_parse_error<rm::SchemaMismatch>(fixture("not_json.scene"), {"line 2"});
  expect_parse_error<rm::SchemaMismatch>(fixture("unknown_sensor.scene"), {"lidar_top"});
  expect_parse_error<rm::SchemaMismatch>(fixture("bad_provenance.results"),
                                         {"line 2", "provenance"});
  expect_parse_error<rm::VersionUnsupported>(fixture("bad_version.results"),
                                             {"version 3"});
}

TEST(SceneIo, MinimalFixtureParsesAndNormalizes) {
  const rm::Scenario s = rm::parse_scene(fixture("minimal.scene"));
  EXPECT_EQ(s.name, "minimal");
  EXPECT_EQ(s.conditions.at("weather"), "clear");
  ASSERT_EQ(s.frames.size(), 2u);
  ASSERT_EQ(s.frames[0].detections.size(), 1u);
  ASSERT_TRUE(s.frames[0].sweeps.has_value());
  const rm::RawRadarReturn& raw = s.frames[0].sweeps->sweeps[0].points.at(0);
  EXPECT_TRUE(raw.sensor_pose.translation.isApprox(Vec3(3.0, 0.0, 1.0), 1e-12));
  const std::string once = scene_bytes(s);
  EXPECT_EQ(once, scene_bytes(parse_scene_str(once)));
}

TEST(SceneIo, MissingFilesRaiseIoError) {
  EXPECT_THROW(rm::parse_scene("/nonexistent/input.scene"), rm::IoError);
  EXPECT_THROW(rm::parse_results("/nonexistent/input.results"), rm::IoError);
  EXPECT_THROW(rm::write_scene("/nonexistent/out.scene", rm::Scenario{}), rm::IoError);
  EXPECT_THROW(rm::write_results("/nonexistent/out.results", {}), rm::IoError);
}

TEST(ReportIo, WritesTextTableAndJsonSummary) {
  rm::Scenario scene;
  scene.name = "tiny";
  rm::Frame f;
  f.frame_id = 0;
  f.t = 0.0;
  rm::GtBox g;
  g.instance_id = "car-0";
  g.class_name = "car";
  g.box.center = Vec3(10.0, 0.0, 0.9);
  f.gt.push_back(g);
  scene.frames.push_back(f);
  rm::TrackOutput o;
  o.frame_id = 0;
  o.track_id = 1;
  o.class_name = "car";
  o.box.center = Vec3(10.0, 0.0, 0.9);
  o.score = 1.0;
  const rm::MetricsReport report = rm::evaluate({{&scene, {o}}}, rm::EvalConfig{});

  const auto dir = std::filesystem::temp_directory_path() / "radarmot_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "report.txt").string();
  rm::write_report(path, report);

  const std::string text = read_file(path);
  EXPECT_NE(text.find("AMOTA"), std::string::npos);
  EXPECT_NE(text.find("overall"), std::string::npos);
  EXPECT_NE(text.find("car"), std::string::npos);

  const nlohmann::ordered_json j = nlohmann::ordered_json::parse(read_file(path + ".json"));
  EXPECT_EQ(j.at("format"), "radarmot-report");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_DOUBLE_EQ(j.at("amota").get<double>(), 1.0);
  ASSERT_EQ(j.at("classes").size(), 1u);
  EXPECT_EQ(j.at("classes")[0].at("class"), "car");
  std::filesystem::remove_all(dir);
}

TEST(GoldenFixtures, PipelineOutputStaysFrozen) {
  rm::RunConfig rc = rm::parse_config_file(fixture("golden.config"));
  rc.sim.seed = 7;
  const rm::Scenario scene = rm::generate(rc.sim);
  EXPECT_EQ(scene_bytes(scene), read_file(fixture("golden.scene")));

  const std::vector<rm::TrackOutput> outputs = rm::run_scene(scene, rc.tracker);
  EXPECT_EQ(results_bytes(outputs), read_file(fixture("golden.results")));

  const rm::MetricsReport report = rm::evaluate({{&scene, outputs}}, rc.eval);
  EXPECT_EQ(rm::report_json(report).dump(2) + "\n", read_file(fixture("golden.report.json")));
}
