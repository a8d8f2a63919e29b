// Copyright 2026 The mipmot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mipmot command-line driver: track, eval, simulate, sweep.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mipmot.hpp"

namespace fs = std::filesystem;
using namespace mipmot;

namespace {

// Runs job(i) for i in [0, n) on `threads` workers (0 = hardware).
// The first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Defaults < config file < --set overrides.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (!path.empty()) {
    auto in = open_input(path);
    cfg = load_run_config(in, path);
  }
  for (const auto& s : overrides) apply_run_key(cfg, parse_assignment(s));
  cfg.tracker_config();  // validates the combination
  return cfg;
}

// Accepts either <root> holding <sub>/ or the directory of files itself.
fs::path data_dir(const fs::path& root, const char* sub) {
  return fs::is_directory(root / sub) ? root / sub : root;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

struct TrackArgs {
  std::string config, input, output;
  std::vector<std::string> set;
  int threads = -1;
};

int cmd_track(const TrackArgs& a) {
  RunConfig cfg = load_config(a.config, a.set);
  if (a.threads >= 0) cfg.threads = a.threads;
  const TrackerConfig tcfg = cfg.tracker_config();
  const fs::path in_dir = data_dir(a.input, "detections");
  const auto seqs = list_sequences(in_dir);
  fs::create_directories(a.output);

  std::vector<SequenceRun> runs(seqs.size());
  parallel_for(seqs.size(), cfg.threads, [&](std::size_t i) {
    const FrameDetections dets = read_detections(in_dir / (seqs[i] + ".txt"));
    SequenceRun run = run_sequence(dets, tcfg);
    write_kitti_tracking(fs::path(a.output) / (seqs[i] + ".txt"), run.frames, cfg.object_type);
    runs[i].mean_frame_seconds = run.mean_frame_seconds;
    runs[i].frames.resize(run.frames.size());
  });
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    std::cout << seqs[i] << ": " << runs[i].frames.size() << " frames, "
              << text::fixed(runs[i].mean_frame_seconds * 1e3, 3) << " ms/frame\n";
  }
  return 0;
}

struct EvalArgs {
  std::vector<std::string> results;
  std::string labels, config, json;
  std::vector<std::string> set;
  bool per_sequence = false;
  int threads = -1;
};

struct EvalSet {
  std::string name;
  fs::path dir;
};

EvalSet parse_eval_set(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
  fs::path p(arg);
  std::string name = p.filename().string();
  if (name.empty()) name = p.parent_path().filename().string();
  return {name, p};
}

int cmd_eval(const EvalArgs& a) {
  RunConfig cfg = load_config(a.config, a.set);
  if (a.threads >= 0) cfg.threads = a.threads;
  const fs::path label_dir = data_dir(a.labels, "labels");
  const auto label_seqs = list_sequences(label_dir);
  const std::set<std::string> label_set(label_seqs.begin(), label_seqs.end());

  std::vector<EvalSet> sets;
  for (const auto& r : a.results) sets.push_back(parse_eval_set(r));
  for (const auto& s : sets) {
    const auto seqs = list_sequences(s.dir);
    std::vector<std::string> missing, extra;
    std::set_difference(label_seqs.begin(), label_seqs.end(), seqs.begin(), seqs.end(), std::back_inserter(missing));
    std::set_difference(seqs.begin(), seqs.end(), label_seqs.begin(), label_seqs.end(), std::back_inserter(extra));
    if (!missing.empty() || !extra.empty()) {
      std::string msg = "sequence sets differ for '" + s.name + "':";
      if (!missing.empty()) msg += " missing results for [" + join(missing) + "]";
      if (!extra.empty()) msg += " no labels for [" + join(extra) + "]";
      throw InvalidInput(msg);
    }
  }

  std::vector<std::vector<LabelRecord>> gt(label_seqs.size());
  parallel_for(label_seqs.size(), cfg.threads,
               [&](std::size_t i) { gt[i] = read_labels(label_dir / (label_seqs[i] + ".txt")); });

  std::vector<std::pair<std::string, MotReport>> rows;
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& s : sets) {
    std::vector<MotReport> per(label_seqs.size());
    parallel_for(label_seqs.size(), cfg.threads, [&](std::size_t i) {
      per[i] = evaluate_sequence(gt[i], read_labels(s.dir / (label_seqs[i] + ".txt")), cfg.eval);
    });
    MotReport total;
    for (const auto& r : per) total += r;
    auto& js = out[s.name];
    js["overall"] = to_json(total);
    for (std::size_t i = 0; i < per.size(); ++i) {
      js["sequences"][label_seqs[i]] = to_json(per[i]);
      if (a.per_sequence) rows.emplace_back(s.name + "/" + label_seqs[i], per[i]);
    }
    rows.emplace_back(s.name, total);
  }
  std::cout << format_table(rows);
  if (!a.json.empty()) {
    auto f = open_output(a.json);
    f << out.dump(2) << '\n';
  }
  return 0;
}

struct SimulateArgs {
  std::string scenario, output;
  std::vector<std::string> set;
};

void write_scenario(const ScenarioConfig& sc, const fs::path& root) {
  const Scenario s = generate(sc);
  fs::create_directories(root / "detections");
  fs::create_directories(root / "labels");
  {
    auto f = open_output(root / "detections" / (sc.name + ".txt"));
    write_detection_records(f, s.detections);
  }
  auto f = open_output(root / "labels" / (sc.name + ".txt"));
  write_labels(f, s.labels);
}

ScenarioConfig load_scenario_file(const std::string& path, const std::vector<std::string>& overrides) {
  ScenarioConfig sc;
  if (!path.empty()) {
    auto in = open_input(path);
    sc = load_scenario(in, path);
  }
  for (const auto& s : overrides) apply_scenario_key(sc, parse_assignment(s));
  validate(sc);
  return sc;
}

int cmd_simulate(const SimulateArgs& a) {
  const ScenarioConfig sc = load_scenario_file(a.scenario, a.set);
  write_scenario(sc, a.output);
  std::cout << "wrote " << sc.name << " to " << a.output << '\n';
  return 0;
}

// Grid axes, in CSV column order.
const std::vector<std::string> kSweepKeys = {"affinity.beta_over_alpha", "association.w_cls", "association.w_aff",
                                             "association.w_se", "tracker.theta_cls", "association.method"};

struct SweepArgs {
  std::string grid, scenario, config, output;
  std::vector<std::string> set;
  int threads = -1;
};

std::string method_name(Associator a) { return a == Associator::Mip ? "mip" : "hungarian"; }

int cmd_sweep(const SweepArgs& a) {
  RunConfig base = load_config(a.config, a.set);
  if (a.threads >= 0) base.threads = a.threads;

  std::map<std::string, std::vector<std::string>> axes;
  {
    auto in = open_input(a.grid);
    for (const auto& e : parse_key_values(in, a.grid)) {
      if (std::find(kSweepKeys.begin(), kSweepKeys.end(), e.key) == kSweepKeys.end()) {
        throw ConfigError(e.key, "not a sweep axis (expected one of " + join(kSweepKeys) + ")");
      }
      auto values = kv::as_strings(e);
      if (values.empty()) throw ConfigError(e.key, "empty value list");
      axes[e.key] = std::move(values);
    }
  }

  // Cartesian product; the last axis in column order varies fastest.
  std::vector<RunConfig> points{base};
  for (const auto& key : kSweepKeys) {
    const auto it = axes.find(key);
    if (it == axes.end()) continue;
    std::vector<RunConfig> next;
    for (const auto& p : points) {
      for (const auto& v : it->second) {
        RunConfig c = p;
        apply_run_key(c, {key, v, 0});
        next.push_back(c);
      }
    }
    points = std::move(next);
  }
  for (const auto& p : points) p.tracker_config();

  const ScenarioConfig sc = load_scenario_file(a.scenario, {});
  const Scenario s = generate(sc);
  // Same text round-trip as simulate + track + eval so the numbers agree.
  std::ostringstream det_text;
  write_detection_records(det_text, s.detections);
  std::istringstream det_in(det_text.str());
  const FrameDetections dets = group_by_frame(parse_detection_records(det_in));
  std::ostringstream gt_text;
  write_labels(gt_text, s.labels);
  std::istringstream gt_in(gt_text.str());
  const auto gt = parse_labels(gt_in);

  std::vector<MotReport> reports(points.size());
  parallel_for(points.size(), base.threads, [&](std::size_t i) {
    const SequenceRun run = run_sequence(dets, points[i].tracker_config());
    std::ostringstream res;
    write_kitti_tracking(res, run.frames, points[i].object_type);
    std::istringstream res_in(res.str());
    reports[i] = evaluate_sequence(gt, parse_labels(res_in), points[i].eval);
  });

  std::ostringstream csv;
  csv << "beta_over_alpha,w_cls,w_aff,w_se,theta_cls,method,MOTA,MOTP,FP,FN,IDSW,FRAG,MT,PT,ML\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const RunConfig& p = points[i];
    const MotReport& r = reports[i];
    csv << text::shortest(p.beta_over_alpha) << ',' << text::shortest(p.weights.w_cls) << ','
        << text::shortest(p.weights.w_aff) << ',' << text::shortest(p.weights.w_se) << ','
        << text::shortest(p.theta_cls) << ',' << method_name(p.associator) << ',' << text::fixed(r.mota(), 6) << ','
        << text::fixed(r.motp(), 6) << ',' << r.fp << ',' << r.fn << ',' << r.idsw << ',' << r.frag << ','
        << text::fixed(r.mt_ratio(), 6) << ',' << text::fixed(r.pt_ratio(), 6) << ','
        << text::fixed(r.ml_ratio(), 6) << '\n';
  }
  if (a.output.empty() || a.output == "-") {
    std::cout << csv.str();
  } else {
    auto f = open_output(a.output);
    f << csv.str();
    std::cout << points.size() << " grid points written to " << a.output << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mipmot: online 3D multi-object tracking with MIP data association"};
  app.require_subcommand(1);

  TrackArgs track;
  auto* t = app.add_subcommand("track", "Track every sequence under an input directory");
  t->add_option("--config,-c", track.config, "Run configuration file")->check(CLI::ExistingFile);
  t->add_option("--input,-i", track.input, "Directory with detections/<seq>.txt (or the files themselves)")
      ->required();
  t->add_option("--output,-o", track.output, "Directory for <seq>.txt results")->required();
  t->add_option("--set", track.set, "Override a config key (key=value), repeatable");
  t->add_option("--threads,-j", track.threads, "Worker threads, 0 = hardware");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score result files against labels");
  e->add_option("--results,-r", ev.results, "Result directory, optionally name=dir; repeat to compare")->required();
  e->add_option("--labels,-l", ev.labels, "Directory with labels/<seq>.txt (or the files themselves)")->required();
  e->add_option("--config,-c", ev.config, "Run configuration file (eval.* keys)")->check(CLI::ExistingFile);
  e->add_option("--set", ev.set, "Override a config key (key=value), repeatable");
  e->add_option("--json", ev.json, "Also write metrics as JSON to this file");
  e->add_flag("--per-sequence", ev.per_sequence, "Print one row per sequence");
  e->add_option("--threads,-j", ev.threads, "Worker threads, 0 = hardware");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic sequence");
  s->add_option("--scenario,-s", sim.scenario, "Scenario file")->check(CLI::ExistingFile);
  s->add_option("--output,-o", sim.output, "Root directory for detections/ and labels/")->required();
  s->add_option("--set", sim.set, "Override a scenario key (key=value), repeatable");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Track and score a scenario over a parameter grid");
  w->add_option("--grid,-g", sw.grid, "Grid file: axis = v1, v2, ...")->required()->check(CLI::ExistingFile);
  w->add_option("--scenario,-s", sw.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  w->add_option("--config,-c", sw.config, "Base run configuration")->check(CLI::ExistingFile);
  w->add_option("--set", sw.set, "Override a base config key (key=value), repeatable");
  w->add_option("--output,-o", sw.output, "CSV path ('-' for stdout)");
  w->add_option("--threads,-j", sw.threads, "Worker threads, 0 = hardware");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*t) return cmd_track(track);
    if (*e) return cmd_eval(ev);
    if (*s) return cmd_simulate(sim);
    if (*w) return cmd_sweep(sw);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 1;
}
