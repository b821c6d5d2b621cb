#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "radarmot/hungarian.hpp"
#include "radarmot/scene.hpp"
#include "radarmot/track.hpp"

namespace radarmot {

struct EvalConfig {
  int n_recall = 40;
  double dist_gate = 2.0;  // planar center distance, m
  std::map<std::string, double> class_range_caps = {
      {"pedestrian", 75.0}, {"bicycle", 75.0}, {"motorcycle", 75.0}};
  double default_range_cap = 150.0;
  std::vector<double> range_bin_edges = {0.0, 50.0, 100.0, 150.0};
  std::vector<std::string> condition_tags;  // groups to break down by; empty = all present
  bool by_range = false;
  bool by_condition = false;

  double cap_for(const std::string& class_name) const {
    const auto it = class_range_caps.find(class_name);
    return it != class_range_caps.end() ? it->second : default_range_cap;
  }
};

struct FrameCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long ids = 0;

  FrameCounts& operator+=(const FrameCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    ids += o.ids;
    return *this;
  }
};

/// One in-scope ground-truth box prepared for matching.
struct GtEntry {
  std::string instance_id;
  Vec2 center = Vec2::Zero();
  int bin = -1;
};

/// One in-scope prediction prepared for matching.
struct PredEntry {
  std::int64_t track_id = 0;
  Vec2 center = Vec2::Zero();
  double score = 1.0;
  int bin = -1;
};

/// Last known GT-instance to track-id pairing, carried frame to frame.
using IdMap = std::map<std::string, std::int64_t>;

struct FrameMatch {
  FrameCounts counts;
  IdMap id_map;
  std::vector<std::pair<int, int>> pairs;  // (gt index, pred index)
};

/// Matches one frame's ground truth against predictions: pairs from the prior
/// map are kept while still within the gate, the rest are assigned by minimum
/// total center distance under the gate. A GT whose matched track id differs
/// from its prior id counts one identity switch.
inline FrameMatch match_frame(const std::vector<GtEntry>& gt,
                              const std::vector<PredEntry>& preds, const IdMap& prior,
                              double dist_gate) {
  const int ng = static_cast<int>(gt.size());
  const int np = static_cast<int>(preds.size());
  std::map<std::int64_t, int> pred_index;
  for (int j = 0; j < np; ++j) {
    pred_index.emplace(preds[j].track_id, j);
  }

  FrameMatch out;
  std::vector<char> gt_used(ng, 0);
  std::vector<char> pred_used(np, 0);

  for (int i = 0; i < ng; ++i) {
    const auto it = prior.find(gt[i].instance_id);
    if (it == prior.end()) continue;
    const auto jt = pred_index.find(it->second);
    if (jt == pred_index.end() || pred_used[jt->second]) continue;
    const int j = jt->second;
    if ((gt[i].center - preds[j].center).norm() <= dist_gate) {
      out.pairs.emplace_back(i, j);
      gt_used[i] = 1;
      pred_used[j] = 1;
    }
  }

  std::vector<int> free_gt;
  std::vector<int> free_pred;
  for (int i = 0; i < ng; ++i) {
    if (!gt_used[i]) free_gt.push_back(i);
  }
  for (int j = 0; j < np; ++j) {
    if (!pred_used[j]) free_pred.push_back(j);
  }
  if (!free_gt.empty() && !free_pred.empty()) {
    std::vector<std::vector<double>> cost(free_gt.size(),
                                          std::vector<double>(free_pred.size(), kUnmatchableCost));
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
      for (std::size_t b = 0; b < free_pred.size(); ++b) {
        const double d = (gt[free_gt[a]].center - preds[free_pred[b]].center).norm();
        if (d <= dist_gate) cost[a][b] = d;
      }
    }
    const std::vector<int> row_to_col = solve_assignment(cost);
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
      const int b = row_to_col[a];
      if (b >= 0 && cost[a][static_cast<std::size_t>(b)] < kUnmatchableCost) {
        out.pairs.emplace_back(free_gt[a], free_pred[static_cast<std::size_t>(b)]);
        gt_used[free_gt[a]] = 1;
        pred_used[free_pred[static_cast<std::size_t>(b)]] = 1;
      }
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());

  out.counts.tp = static_cast<long>(out.pairs.size());
  out.counts.fn = ng - out.counts.tp;
  out.counts.fp = np - out.counts.tp;
  out.id_map = prior;
  for (const auto& [i, j] : out.pairs) {
    const auto it = prior.find(gt[i].instance_id);
    if (it != prior.end() && it->second != preds[j].track_id) {
      out.counts.ids += 1;
    }
    out.id_map[gt[i].instance_id] = preds[j].track_id;
  }
  return out;
}

/// Recall-conditioned tracking accuracy, clamped to [0, 1].
inline double motar(long ids_r, long fp_r, long fn_r, double r, long gt_positives) {
  if (!(r > 0.0) || r > 1.0) {
    throw InvalidRecall("recall must lie in (0, 1]");
  }
  if (gt_positives <= 0) {
    throw NoPositives("MOTAR needs at least one ground-truth positive");
  }
  const double p = static_cast<double>(gt_positives);
  const double raw =
      1.0 - (static_cast<double>(ids_r + fp_r + fn_r) - (1.0 - r) * p) / (r * p);
  return std::clamp(raw, 0.0, 1.0);
}

/// Mean MOTAR over the n-1 recall sampling points; absent points are the
/// unachieved ones and contribute zero.
inline double amota(const std::map<double, double>& per_recall_motar, int n) {
  if (n < 2) {
    throw InvalidRecall("the recall ladder needs at least two sampling points");
  }
  double sum = 0.0;
  for (const auto& [r, m] : per_recall_motar) {
    sum += m;
  }
  return sum / static_cast<double>(n - 1);
}

struct OperatingPoint {
  double recall_target = 0.0;
  bool achieved = false;
  double threshold = 0.0;  // meaningful only when achieved
  double recall = 0.0;     // realized recall at the threshold
  double motar_value = 0.0;
  FrameCounts counts;
  std::vector<FrameCounts> bin_counts;
  std::vector<double> bin_motar;
};

struct BinSummary {
  std::string label;
  long gt = 0;
  double amota = 0.0;
  FrameCounts counts;  // at the reporting operating point
};

struct ClassReport {
  std::string class_name;
  long gt_count = 0;
  double amota_value = 0.0;
  std::vector<OperatingPoint> points;
  int best_index = -1;  // operating point whose counts are reported
  std::vector<BinSummary> bins;

  const OperatingPoint* best() const {
    return best_index >= 0 ? &points[static_cast<std::size_t>(best_index)] : nullptr;
  }
};

struct ConditionSummary {
  std::string group;
  std::string value;
  int scene_count = 0;
  double amota_value = 0.0;
  long ids = 0;
};

struct MetricsReport {
  int n_recall = 40;
  double dist_gate = 2.0;
  std::vector<std::string> bin_labels;
  double amota_value = 0.0;  // mean over classes with ground truth
  FrameCounts totals;        // summed per-class counts at reporting points
  std::vector<ClassReport> classes;
  std::vector<BinSummary> bins;  // aggregate over classes, when by_range
  std::vector<ConditionSummary> conditions;
};

/// Ground truth of one scenario paired with tracker outputs for it. The
/// scenario must outlive the evaluation call.
struct ScenePredictions {
  const Scenario* scenario = nullptr;
  std::vector<TrackOutput> outputs;
};

namespace detail {

struct EvalFrame {
  std::vector<GtEntry> gt;
  std::vector<PredEntry> preds;  // full score range; thresholded per pass
};

struct PassResult {
  FrameCounts counts;
  std::vector<FrameCounts> bins;
  std::vector<double> tp_scores;
};

inline int bin_of(double dist, const std::vector<double>& edges) {
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (dist >= edges[i] && dist < edges[i + 1]) return static_cast<int>(i);
  }
  return -1;
}

/// One matching pass over every scene at one score threshold.
inline PassResult run_pass(const std::vector<std::vector<EvalFrame>>& scenes, double threshold,
                           double dist_gate, std::size_t n_bins, bool collect_scores) {
  PassResult out;
  out.bins.assign(n_bins, {});
  std::vector<PredEntry> kept;
  for (const std::vector<EvalFrame>& frames : scenes) {
    IdMap id_map;
    for (const EvalFrame& fr : frames) {
      kept.clear();
      for (const PredEntry& p : fr.preds) {
        if (p.score >= threshold) kept.push_back(p);
      }
      const FrameMatch fm = match_frame(fr.gt, kept, id_map, dist_gate);
      out.counts += fm.counts;

      std::vector<char> gt_used(fr.gt.size(), 0);
      std::vector<char> pred_used(kept.size(), 0);
      for (const auto& [i, j] : fm.pairs) {
        gt_used[static_cast<std::size_t>(i)] = 1;
        pred_used[static_cast<std::size_t>(j)] = 1;
        if (collect_scores) out.tp_scores.push_back(kept[static_cast<std::size_t>(j)].score);
        const int b = fr.gt[static_cast<std::size_t>(i)].bin;
        if (b >= 0 && static_cast<std::size_t>(b) < n_bins) {
          out.bins[static_cast<std::size_t>(b)].tp += 1;
          const auto it = id_map.find(fr.gt[static_cast<std::size_t>(i)].instance_id);
          if (it != id_map.end() && it->second != kept[static_cast<std::size_t>(j)].track_id) {
            out.bins[static_cast<std::size_t>(b)].ids += 1;
          }
        }
      }
      for (std::size_t i = 0; i < fr.gt.size(); ++i) {
        if (!gt_used[i] && fr.gt[i].bin >= 0 && static_cast<std::size_t>(fr.gt[i].bin) < n_bins) {
          out.bins[static_cast<std::size_t>(fr.gt[i].bin)].fn += 1;
        }
      }
      for (std::size_t j = 0; j < kept.size(); ++j) {
        if (!pred_used[j] && kept[j].bin >= 0 && static_cast<std::size_t>(kept[j].bin) < n_bins) {
          out.bins[static_cast<std::size_t>(kept[j].bin)].fp += 1;
        }
      }
      id_map = fm.id_map;
    }
  }
  return out;
}

}  // namespace detail

/// Full evaluation: per-class recall sweep, AMOTA, counts at the best
/// operating point, optional range-bin and condition breakdowns.
inline MetricsReport evaluate(const std::vector<ScenePredictions>& scenes,
                              const EvalConfig& cfg) {
  if (cfg.n_recall < 2) {
    throw InvalidConfig("n_recall must be at least 2");
  }
  if (!(cfg.dist_gate > 0.0)) {
    throw InvalidConfig("dist_gate must be positive");
  }
  for (std::size_t i = 1; i < cfg.range_bin_edges.size(); ++i) {
    if (!(cfg.range_bin_edges[i] > cfg.range_bin_edges[i - 1])) {
      throw InvalidConfig("range bin edges must be strictly increasing");
    }
  }

  const std::size_t n_bins =
      cfg.range_bin_edges.size() >= 2 ? cfg.range_bin_edges.size() - 1 : 0;
  MetricsReport report;
  report.n_recall = cfg.n_recall;
  report.dist_gate = cfg.dist_gate;
  for (std::size_t b = 0; b < n_bins; ++b) {
    char label[64];
    std::snprintf(label, sizeof(label), "%g-%g", cfg.range_bin_edges[b],
                  cfg.range_bin_edges[b + 1]);
    report.bin_labels.push_back(label);
  }

  // collect classes and per-frame ego positions; validate prediction frame ids
  std::set<std::string> class_names;
  std::vector<std::map<std::int64_t, std::size_t>> frame_index(scenes.size());
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    if (scenes[s].scenario == nullptr) {
      throw SchemaMismatch("evaluation input without a scenario");
    }
    const Scenario& sc = *scenes[s].scenario;
    for (std::size_t k = 0; k < sc.frames.size(); ++k) {
      frame_index[s].emplace(sc.frames[k].frame_id, k);
      for (const GtBox& g : sc.frames[k].gt) class_names.insert(g.class_name);
    }
    for (const TrackOutput& o : scenes[s].outputs) {
      if (frame_index[s].find(o.frame_id) == frame_index[s].end()) {
        throw SchemaMismatch("prediction references unknown frame_id " +
                             std::to_string(o.frame_id) + " in scene " + sc.name);
      }
      class_names.insert(o.class_name);
    }
  }
  if (cfg.by_range) {
    for (const std::string& c : class_names) {
      if (n_bins == 0 || cfg.cap_for(c) > cfg.range_bin_edges.back()) {
        throw InvalidConfig("range bins must cover the range cap of class " + c);
      }
    }
  }

  const int n = cfg.n_recall;
  double amota_sum = 0.0;
  int amota_classes = 0;
  std::vector<double> agg_bin_amota_sum(n_bins, 0.0);
  std::vector<int> agg_bin_classes(n_bins, 0);

  for (const std::string& class_name : class_names) {
    const double cap = cfg.cap_for(class_name);

    // per-scene, per-frame in-scope entries for this class
    std::vector<std::vector<detail::EvalFrame>> class_scenes(scenes.size());
    long positives = 0;
    std::vector<long> bin_positives(n_bins, 0);
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      const Scenario& sc = *scenes[s].scenario;
      class_scenes[s].resize(sc.frames.size());
      for (std::size_t k = 0; k < sc.frames.size(); ++k) {
        const Vec2 ego_xy = sc.frames[k].ego.pose.translation.head<2>();
        for (const GtBox& g : sc.frames[k].gt) {
          if (g.class_name != class_name) continue;
          const Vec2 c = g.box.center.head<2>();
          const double dist = (c - ego_xy).norm();
          if (dist >= cap) continue;
          GtEntry e;
          e.instance_id = g.instance_id;
          e.center = c;
          e.bin = detail::bin_of(dist, cfg.range_bin_edges);
          class_scenes[s][k].gt.push_back(std::move(e));
          positives += 1;
          if (class_scenes[s][k].gt.back().bin >= 0) {
            bin_positives[static_cast<std::size_t>(class_scenes[s][k].gt.back().bin)] += 1;
          }
        }
      }
      for (const TrackOutput& o : scenes[s].outputs) {
        if (o.class_name != class_name) continue;
        const std::size_t k = frame_index[s].at(o.frame_id);
        const Vec2 ego_xy = sc.frames[k].ego.pose.translation.head<2>();
        const Vec2 c = o.box.center.head<2>();
        const double dist = (c - ego_xy).norm();
        if (dist >= cap) continue;
        PredEntry e;
        e.track_id = o.track_id;
        e.center = c;
        e.score = o.score;
        e.bin = detail::bin_of(dist, cfg.range_bin_edges);
        class_scenes[s][k].preds.push_back(std::move(e));
      }
    }
    if (positives == 0) continue;

    ClassReport cr;
    cr.class_name = class_name;
    cr.gt_count = positives;

    const double neg_inf = -std::numeric_limits<double>::infinity();
    detail::PassResult all =
        detail::run_pass(class_scenes, neg_inf, cfg.dist_gate, n_bins, true);
    std::sort(all.tp_scores.begin(), all.tp_scores.end(), std::greater<double>());

    std::map<double, double> motar_by_recall;
    std::vector<double> bin_motar_sum(n_bins, 0.0);
    for (int k = 1; k <= n - 1; ++k) {
      OperatingPoint pt;
      pt.recall_target = static_cast<double>(k) / static_cast<double>(n - 1);
      const long needed = (static_cast<long>(k) * positives + n - 2) / (n - 1);
      if (needed > static_cast<long>(all.tp_scores.size())) {
        motar_by_recall[pt.recall_target] = 0.0;
        cr.points.push_back(std::move(pt));
        continue;
      }
      pt.achieved = true;
      pt.threshold = all.tp_scores[static_cast<std::size_t>(needed - 1)];
      const detail::PassResult pass =
          detail::run_pass(class_scenes, pt.threshold, cfg.dist_gate, n_bins, false);
      pt.counts = pass.counts;
      pt.bin_counts = pass.bins;
      pt.recall = static_cast<double>(pass.counts.tp) / static_cast<double>(positives);
      pt.motar_value =
          pt.recall > 0.0
              ? motar(pass.counts.ids, pass.counts.fp, pass.counts.fn, pt.recall, positives)
              : 0.0;
      pt.bin_motar.assign(n_bins, 0.0);
      for (std::size_t b = 0; b < n_bins; ++b) {
        const double rb = bin_positives[b] > 0 ? static_cast<double>(pass.bins[b].tp) /
                                                     static_cast<double>(bin_positives[b])
                                               : 0.0;
        if (rb > 0.0) {
          pt.bin_motar[b] =
              motar(pass.bins[b].ids, pass.bins[b].fp, pass.bins[b].fn, rb, bin_positives[b]);
          bin_motar_sum[b] += pt.bin_motar[b];
        }
      }
      motar_by_recall[pt.recall_target] = pt.motar_value;
      cr.points.push_back(std::move(pt));
    }

    cr.amota_value = amota(motar_by_recall, n);
    for (std::size_t i = 0; i < cr.points.size(); ++i) {
      if (!cr.points[i].achieved) continue;
      if (cr.best_index < 0 ||
          cr.points[i].motar_value >=
              cr.points[static_cast<std::size_t>(cr.best_index)].motar_value) {
        cr.best_index = static_cast<int>(i);
      }
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
      BinSummary bs;
      bs.label = report.bin_labels[b];
      bs.gt = bin_positives[b];
      bs.amota = bin_positives[b] > 0 ? bin_motar_sum[b] / static_cast<double>(n - 1) : 0.0;
      if (cr.best()) bs.counts = cr.best()->bin_counts[b];
      cr.bins.push_back(std::move(bs));
      if (bin_positives[b] > 0) {
        agg_bin_amota_sum[b] += cr.bins.back().amota;
        agg_bin_classes[b] += 1;
      }
    }

    amota_sum += cr.amota_value;
    amota_classes += 1;
    if (cr.best()) report.totals += cr.best()->counts;
    report.classes.push_back(std::move(cr));
  }

  report.amota_value = amota_classes > 0 ? amota_sum / amota_classes : 0.0;
  if (cfg.by_range) {
    for (std::size_t b = 0; b < n_bins; ++b) {
      BinSummary bs;
      bs.label = report.bin_labels[b];
      for (const ClassReport& cr : report.classes) {
        bs.gt += cr.bins[b].gt;
        bs.counts += cr.bins[b].counts;
      }
      bs.amota = agg_bin_classes[b] > 0
                     ? agg_bin_amota_sum[b] / static_cast<double>(agg_bin_classes[b])
                     : 0.0;
      report.bins.push_back(std::move(bs));
    }
  }

  if (cfg.by_condition) {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const ScenePredictions& sp : scenes) {
      for (const auto& [group, value] : sp.scenario->conditions) {
        if (!cfg.condition_tags.empty() &&
            std::find(cfg.condition_tags.begin(), cfg.condition_tags.end(), group) ==
                cfg.condition_tags.end()) {
          continue;
        }
        pairs.emplace(group, value);
      }
    }
    for (const auto& [group, value] : pairs) {
      std::vector<ScenePredictions> subset;
      for (const ScenePredictions& sp : scenes) {
        const auto it = sp.scenario->conditions.find(group);
        if (it != sp.scenario->conditions.end() && it->second == value) {
          subset.push_back(sp);
        }
      }
      EvalConfig sub_cfg = cfg;
      sub_cfg.by_range = false;
      sub_cfg.by_condition = false;
      const MetricsReport sub = evaluate(subset, sub_cfg);
      ConditionSummary cs;
      cs.group = group;
      cs.value = value;
      cs.scene_count = static_cast<int>(subset.size());
      cs.amota_value = sub.amota_value;
      cs.ids = sub.totals.ids;
      report.conditions.push_back(std::move(cs));
    }
  }
  return report;
}

}  // namespace radarmot
