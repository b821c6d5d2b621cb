#include <set>

#include <gtest/gtest.h>

#include <radarmot/tracker.hpp>

namespace rm = radarmot;
using rm::Vec2;
using rm::Vec3;

namespace {

rm::Detection car_detection(const Vec2& pos, const Vec2& vel, double score = 0.9) {
  rm::Detection det;
  det.class_name = "car";
  det.score = score;
  det.box.center = Vec3(pos.x(), pos.y(), 0.9);
  det.box.extents = Vec3(4.0, 2.0, 1.8);
  det.box.velocity = vel;
  return det;
}

rm::RadarPoint radar_return(const Vec3& p_global, const Vec2& v_true) {
  rm::RadarPoint p;
  p.p_global = p_global;
  p.p_sensor = p_global;  // sensor at the reference origin, identity mount
  p.los = rm::bearing(p.p_sensor);
  p.v_radial = rm::project_velocity_los(v_true, p.los, rm::Mat3::Identity());
  return p;
}

rm::Frame keyframe(std::int64_t id, double t) {
  rm::Frame f;
  f.frame_id = id;
  f.t = t;
  return f;
}

/// Frames for one object cruising along +x from (20, 0) at 8 m/s. Frames in
/// blackout get no detection; frames in radar_frames get four surface returns.
std::vector<rm::Frame> cruise_frames(int n, const std::set<int>& blackout,
                                     const std::set<int>& radar_frames) {
  std::vector<rm::Frame> frames;
  for (int k = 0; k < n; ++k) {
    const double t = 0.5 * k;
    const Vec2 pos(20.0 + 8.0 * t, 0.0);
    const Vec2 vel(8.0, 0.0);
    rm::Frame f = keyframe(k, t);
    if (!blackout.count(k)) {
      f.detections.push_back(car_detection(pos, vel));
    }
    if (radar_frames.count(k)) {
      for (const Vec2& off : {Vec2(0.8, 0.3), Vec2(-0.7, -0.4), Vec2(0.2, 0.6), Vec2(-1.0, 0.1)}) {
        f.radar_points.push_back(radar_return(Vec3(pos.x() + off.x(), pos.y() + off.y(), 0.9), vel));
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

TEST(Tracker, ConfirmsAfterTwoHitsAndKeepsId) {
  rm::Tracker tracker;
  const auto frames = cruise_frames(4, {}, {});
  EXPECT_TRUE(tracker.step(frames[0]).empty());  // tentative on first sight
  std::int64_t id = -1;
  for (int k = 1; k < 4; ++k) {
    const auto out = tracker.step(frames[k]);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].frame_id, k);
    EXPECT_EQ(out[0].class_name, "car");
    EXPECT_EQ(out[0].provenance, rm::Provenance::Detection);
    if (id < 0) id = out[0].track_id;
    EXPECT_EQ(out[0].track_id, id);
  }
}

TEST(Tracker, NeverEmitsCoastingTracks) {
  rm::Tracker tracker;
  const auto frames = cruise_frames(4, {2}, {});
  tracker.step(frames[0]);
  EXPECT_EQ(tracker.step(frames[1]).size(), 1u);
  EXPECT_TRUE(tracker.step(frames[2]).empty());  // coasting, not emitted
  const auto out = tracker.step(frames[3]);
  ASSERT_EQ(out.size(), 1u);  // still the same track after the gap
  EXPECT_EQ(tracker.tracks().size(), 1u);
}

TEST(Tracker, ConfirmedTrackDiesPastMissLimit) {
  rm::Tracker tracker;  // max_misses_confirmed 3
  const auto frames = cruise_frames(7, {2, 3, 4, 5}, {});
  for (int k = 0; k < 5; ++k) tracker.step(frames[k]);
  EXPECT_EQ(tracker.tracks().size(), 1u);  // three misses, still alive
  tracker.step(frames[5]);
  EXPECT_TRUE(tracker.tracks().empty());  // fourth miss kills it
  tracker.step(frames[6]);
  ASSERT_EQ(tracker.tracks().size(), 1u);
  EXPECT_EQ(tracker.tracks()[0].hits, 1);  // fresh tentative track
}

TEST(Tracker, TentativeTrackDiesAfterTwoMisses) {
  rm::Tracker tracker;  // max_misses_tentative 1
  const auto frames = cruise_frames(4, {1, 2, 3}, {});
  tracker.step(frames[0]);
  tracker.step(frames[1]);
  EXPECT_EQ(tracker.tracks().size(), 1u);
  tracker.step(frames[2]);
  EXPECT_TRUE(tracker.tracks().empty());
}

TEST(Tracker, LowScoreDetectionsNeverBirth) {
  rm::Tracker tracker;
  rm::Frame f = keyframe(0, 0.0);
  f.detections.push_back(car_detection(Vec2(30.0, 0.0), Vec2(5.0, 0.0), 0.2));
  tracker.step(f);
  EXPECT_TRUE(tracker.tracks().empty());

  rm::Frame f2 = keyframe(1, 0.5);
  f2.detections.push_back(car_detection(Vec2(30.0, 0.0), Vec2(5.0, 0.0), 0.4));
  tracker.step(f2);
  EXPECT_EQ(tracker.tracks().size(), 1u);
}

TEST(Tracker, RejectsNonMonotonicKeyframes) {
  rm::Tracker tracker;
  tracker.step(keyframe(0, 1.0));
  EXPECT_THROW(tracker.step(keyframe(1, 1.0)), rm::NonMonotonicTime);
  EXPECT_THROW(tracker.step(keyframe(2, 0.5)), rm::NonMonotonicTime);
}

TEST(Tracker, RadarCarriesTrackThroughBlackout) {
  rm::TrackerConfig cfg;
  cfg.lifecycle.max_misses_confirmed = 2;
  const std::set<int> blackout = {2, 3, 4};
  const std::set<int> radar = {0, 1, 2, 3, 4, 5, 6};
  const auto frames = cruise_frames(7, blackout, radar);

  rm::Tracker with_radar(cfg);
  std::set<std::int64_t> ids;
  for (int k = 0; k < 7; ++k) {
    const auto out = with_radar.step(frames[k]);
    if (k == 0) {
      EXPECT_TRUE(out.empty());
      continue;
    }
    ASSERT_EQ(out.size(), 1u) << "frame " << k;
    ids.insert(out[0].track_id);
    const bool dark = blackout.count(k) > 0;
    EXPECT_EQ(out[0].provenance, dark ? rm::Provenance::Radar : rm::Provenance::Detection)
        << "frame " << k;
  }
  EXPECT_EQ(ids.size(), 1u);  // one identity across the blackout

  rm::TrackerConfig no_assoc = cfg;
  no_assoc.enable_radar_assoc = false;
  rm::Tracker without(no_assoc);
  std::int64_t id_before = -1;
  std::int64_t id_after = -1;
  for (int k = 0; k < 7; ++k) {
    const auto out = without.step(frames[k]);
    if (blackout.count(k)) {
      EXPECT_TRUE(out.empty()) << "frame " << k;
    }
    if (!out.empty()) {
      if (k < 2) id_before = out[0].track_id;
      if (k > 4) id_after = out[0].track_id;
    }
  }
  ASSERT_GE(id_before, 0);
  ASSERT_GE(id_after, 0);
  EXPECT_NE(id_before, id_after);  // the original track died in the dark
}

TEST(Tracker, RadarUpdateSharpensVelocity) {
  // detections carry a persistently biased velocity; radar sees the true one
  const Vec2 v_true(8.0, 0.0);
  const Vec2 v_biased(7.5, 0.0);
  std::vector<rm::Frame> frames;
  for (int k = 0; k < 8; ++k) {
    const double t = 0.5 * k;
    const Vec2 pos(20.0 + v_true.x() * t, 0.0);
    rm::Frame f = keyframe(k, t);
    f.detections.push_back(car_detection(pos, v_biased));
    for (const Vec2& off : {Vec2(0.5, 0.3), Vec2(-0.5, -0.3), Vec2(0.0, 0.5)}) {
      f.radar_points.push_back(radar_return(Vec3(pos.x() + off.x(), pos.y() + off.y(), 0.9), v_true));
    }
    frames.push_back(std::move(f));
  }

  rm::TrackerConfig with_cfg;
  rm::TrackerConfig without_cfg;
  without_cfg.enable_radar_kf = false;
  rm::Tracker with_radar(with_cfg);
  rm::Tracker without(without_cfg);
  Vec2 v_with = Vec2::Zero();
  Vec2 v_without = Vec2::Zero();
  for (const rm::Frame& f : frames) {
    const auto a = with_radar.step(f);
    const auto b = without.step(f);
    if (!a.empty()) v_with = a[0].velocity;
    if (!b.empty()) v_without = b[0].velocity;
  }
  EXPECT_LT((v_with - v_true).norm(), (v_without - v_true).norm());
  EXPECT_LT((v_with - v_true).norm(), 0.2);
}

TEST(Tracker, RunSceneConcatenatesFrames) {
  rm::Scenario scene;
  scene.frames = cruise_frames(3, {}, {});
  const auto outputs = rm::run_scene(scene);
  ASSERT_EQ(outputs.size(), 2u);
  EXPECT_EQ(outputs[0].frame_id, 1);
  EXPECT_EQ(outputs[1].frame_id, 2);
  EXPECT_EQ(outputs[0].track_id, outputs[1].track_id);
}

TEST(Tracker, SeparateObjectsGetSeparateIds) {
  rm::Tracker tracker;
  for (int k = 0; k < 3; ++k) {
    rm::Frame f = keyframe(k, 0.5 * k);
    f.detections.push_back(car_detection(Vec2(20.0 + 4.0 * k, 0.0), Vec2(8.0, 0.0)));
    f.detections.push_back(car_detection(Vec2(-30.0, 10.0), Vec2(0.0, 0.0)));
    const auto out = tracker.step(f);
    if (k > 0) {
      ASSERT_EQ(out.size(), 2u);
      EXPECT_NE(out[0].track_id, out[1].track_id);
    }
  }
}
