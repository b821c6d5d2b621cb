// Command-line front end: simulate, track, eval, plot.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <radarmot/radarmot.hpp>

namespace {

radarmot::RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return radarmot::parse_config_file(path);
}

int run_simulate(const std::string& config_path, bool seed_given, std::uint64_t seed,
                 const std::string& out_path) {
  radarmot::RunConfig rc = load_config(config_path);
  if (seed_given) rc.sim.seed = seed;
  const radarmot::Scenario scene = radarmot::generate(rc.sim);
  radarmot::write_scene(out_path, scene);
  std::cout << "wrote " << scene.frames.size() << " frames to " << out_path << "\n";
  return 0;
}

int run_track(const std::string& scene_path, const std::string& config_path,
              const std::string& out_path, bool no_radar_kf, bool no_radar_assoc,
              bool no_cross_check) {
  radarmot::RunConfig rc = load_config(config_path);
  if (no_radar_kf) rc.tracker.enable_radar_kf = false;
  if (no_radar_assoc) rc.tracker.enable_radar_assoc = false;
  if (no_cross_check) rc.tracker.enable_cross_check = false;
  const radarmot::Scenario scene = radarmot::parse_scene(scene_path);
  const std::vector<radarmot::TrackOutput> outputs = radarmot::run_scene(scene, rc.tracker);
  radarmot::write_results(out_path, outputs);
  std::cout << "wrote " << outputs.size() << " outputs to " << out_path << "\n";
  return 0;
}

int run_eval(const std::vector<std::string>& scene_paths,
             const std::vector<std::string>& results_paths, const std::string& config_path,
             const std::string& out_path, bool by_range, bool by_condition) {
  if (scene_paths.size() != results_paths.size()) {
    std::cerr << "error: --scene and --results must be given the same number of times\n";
    return 1;
  }
  radarmot::RunConfig rc = load_config(config_path);
  rc.eval.by_range = by_range;
  rc.eval.by_condition = by_condition;

  std::vector<radarmot::Scenario> scenes;
  scenes.reserve(scene_paths.size());
  for (const std::string& p : scene_paths) {
    scenes.push_back(radarmot::parse_scene(p));
  }
  std::vector<radarmot::ScenePredictions> inputs;
  inputs.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    inputs.push_back({&scenes[i], radarmot::parse_results(results_paths[i])});
  }
  const radarmot::MetricsReport report = radarmot::evaluate(inputs, rc.eval);
  radarmot::write_report(out_path, report);
  std::printf("AMOTA %.1f%%  TP %ld  FP %ld  FN %ld  IDS %ld  (report: %s)\n",
              100.0 * report.amota_value, report.totals.tp, report.totals.fp,
              report.totals.fn, report.totals.ids, out_path.c_str());
  return 0;
}

void write_csv(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) {
    throw radarmot::IoError("cannot open '" + path.string() + "' for writing");
  }
  os << content;
  os.flush();
  if (!os) {
    throw radarmot::IoError("failed while writing '" + path.string() + "'");
  }
}

int run_plot(const std::string& report_path, const std::string& out_dir) {
  std::ifstream is(report_path);
  if (!is) {
    throw radarmot::IoError("cannot open '" + report_path + "' for reading");
  }
  const nlohmann::json report = nlohmann::json::parse(is, nullptr, false);
  if (report.is_discarded() || !report.is_object() ||
      report.value("format", "") != "radarmot-report") {
    throw radarmot::SchemaMismatch("'" + report_path + "' is not a radarmot-report JSON file");
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  char buf[256];

  std::string by_class = "class,gt,amota,tp,fp,fn,ids\n";
  std::string by_recall = "class,recall_target,achieved,motar\n";
  for (const auto& jc : report.value("classes", nlohmann::json::array())) {
    std::snprintf(buf, sizeof(buf), "%s,%ld,%.6f,%ld,%ld,%ld,%ld\n",
                  jc.value("class", "").c_str(), jc.value("gt", 0L), jc.value("amota", 0.0),
                  jc.value("tp", 0L), jc.value("fp", 0L), jc.value("fn", 0L),
                  jc.value("ids", 0L));
    by_class += buf;
    for (const auto& jp : jc.value("motar_by_recall", nlohmann::json::array())) {
      std::snprintf(buf, sizeof(buf), "%s,%.6f,%d,%.6f\n", jc.value("class", "").c_str(),
                    jp.value("recall_target", 0.0), jp.value("achieved", false) ? 1 : 0,
                    jp.value("motar", 0.0));
      by_recall += buf;
    }
  }
  write_csv(dir / "amota_by_class.csv", by_class);
  write_csv(dir / "motar_by_recall.csv", by_recall);

  if (report.contains("bins")) {
    std::string by_range = "range_bin,gt,amota,tp,fp,fn,ids\n";
    for (const auto& jb : report["bins"]) {
      std::snprintf(buf, sizeof(buf), "%s,%ld,%.6f,%ld,%ld,%ld,%ld\n",
                    jb.value("label", "").c_str(), jb.value("gt", 0L), jb.value("amota", 0.0),
                    jb.value("tp", 0L), jb.value("fp", 0L), jb.value("fn", 0L),
                    jb.value("ids", 0L));
      by_range += buf;
    }
    write_csv(dir / "amota_by_range.csv", by_range);
  }
  if (report.contains("conditions")) {
    std::string conds = "group,value,scenes,amota,ids\n";
    for (const auto& jc : report["conditions"]) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.6f,%ld\n", jc.value("group", "").c_str(),
                    jc.value("value", "").c_str(), jc.value("scenes", 0),
                    jc.value("amota", 0.0), jc.value("ids", 0L));
      conds += buf;
    }
    write_csv(dir / "conditions.csv", conds);
  }
  std::cout << "wrote figure data to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radarmot: radar-informed 3D multi-object tracking"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scene_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool no_radar_kf = false;
  bool no_radar_assoc = false;
  bool no_cross_check = false;
  std::vector<std::string> scene_paths;
  std::vector<std::string> results_paths;
  bool by_range = false;
  bool by_condition = false;
  std::string report_path;
  std::string out_dir;

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic scenario file");
  sim->add_option("--config", config_path, "run configuration file");
  CLI::Option* seed_opt = sim->add_option("--seed", seed, "override the scenario seed");
  sim->add_option("--out", out_path, "output scene file")->required();

  CLI::App* trk = app.add_subcommand("track", "run the tracker over a scenario file");
  trk->add_option("--scene", scene_path, "input scene file")->required();
  trk->add_option("--config", config_path, "run configuration file");
  trk->add_option("--out", out_path, "output results file")->required();
  trk->add_flag("--no-radar-kf", no_radar_kf, "disable radial-velocity state updates");
  trk->add_flag("--no-radar-assoc", no_radar_assoc, "disable second-stage radar recovery");
  trk->add_flag("--no-cross-check", no_cross_check,
                "replace the bidirectional stage-1 cost with plain center distance");

  CLI::App* ev = app.add_subcommand("eval", "evaluate tracking results against ground truth");
  ev->add_option("--scene", scene_paths, "scene file (repeat per scene)")->required();
  ev->add_option("--results", results_paths, "results file (repeat, paired with --scene)")
      ->required();
  ev->add_option("--config", config_path, "run configuration file");
  ev->add_option("--out", out_path, "report path (text; JSON written alongside)")->required();
  ev->add_flag("--by-range", by_range, "break results down by range bin");
  ev->add_flag("--by-condition", by_condition, "break results down by scene condition");

  CLI::App* plt = app.add_subcommand("plot", "emit figure data (CSV) from a report");
  plt->add_option("--report", report_path, "report JSON file")->required();
  plt->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) {
      return run_simulate(config_path, seed_opt->count() > 0, seed, out_path);
    }
    if (trk->parsed()) {
      return run_track(scene_path, config_path, out_path, no_radar_kf, no_radar_assoc,
                       no_cross_check);
    }
    if (ev->parsed()) {
      return run_eval(scene_paths, results_paths, config_path, out_path, by_range,
                      by_condition);
    }
    if (plt->parsed()) {
      return run_plot(report_path, out_dir);
    }
  } catch (const radarmot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
