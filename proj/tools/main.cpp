#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cbtrack/grid_search.hpp>
#include <cbtrack/linker.hpp>
#include <cbtrack/metrics.hpp>
#include <cbtrack/mot_io.hpp>
#include <cbtrack/synth.hpp>
#include <cbtrack/tracker.hpp>

namespace {

using cbtrack::RunConfig;

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string metrics_csv(const cbtrack::MetricReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.4f,%.4f", 100.0 * r.hota,
                100.0 * r.deta, 100.0 * r.assa, 100.0 * r.mota, 100.0 * r.idf1);
  return buf;
}

std::vector<std::pair<std::string, std::string>> read_pair_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'gt_path,pred_path'");
    }
    pairs.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  if (pairs.empty()) throw std::runtime_error(path + ": empty sequence list");
  return pairs;
}

std::vector<double> parse_grid_axis(const std::string& text) {
  double lo = 0, hi = 0, step = 0;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw std::runtime_error("grid must be 'lo:hi:step', got '" + text + "'");
  }
  lo = std::stod(text.substr(0, first));
  hi = std::stod(text.substr(first + 1, second - first - 1));
  step = std::stod(text.substr(second + 1));
  if (!(step > 0.0) || hi < lo) throw std::runtime_error("grid requires lo <= hi and step > 0");
  std::vector<double> values;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + 1e-9) break;
    values.push_back(v);
  }
  return values;
}

// Tracker flags shared by track/bench/gridsearch. Flags override any
// --config file; giou/diou default the threshold to 0.5 on the rescaled
// scale (raw score >= 0) unless --threshold is given.
struct TrackerCli {
  CLI::Option* config_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  std::string config_path;
  double buffer_small = 0.7;
  double buffer_large = 1.0;
  double threshold = 0.01;
  int max_age = 60;
  std::string affinity = "biou_cascade";

  void attach(CLI::App& cmd, bool with_config = true) {
    if (with_config) {
      config_opt = cmd.add_option("--config", config_path,
                                  "run configuration file (key = value lines)");
    }
    cmd.add_option("--buffer-small", buffer_small, "tier-1 buffer scale")
        ->capture_default_str();
    cmd.add_option("--buffer-large", buffer_large, "tier-2 buffer scale")
        ->capture_default_str();
    threshold_opt =
        cmd.add_option("--threshold", threshold, "match threshold in [0,1]")
            ->capture_default_str();
    cmd.add_option("--max-age", max_age, "frames a track survives unmatched")
        ->capture_default_str();
    cmd.add_option("--affinity", affinity, "iou|giou|diou|biou_cascade")
        ->capture_default_str();
  }

  cbtrack::TrackerConfig resolve(const CLI::App& cmd) const {
    cbtrack::TrackerConfig config;
    if (config_opt && !config_path.empty()) {
      config = cbtrack::read_run_config(config_path).tracker;
    }
    if (cmd.count("--buffer-small")) config.buffer_small = cbtrack::BufferScale(buffer_small);
    if (cmd.count("--buffer-large")) config.buffer_large = cbtrack::BufferScale(buffer_large);
    if (cmd.count("--max-age")) config.max_age = max_age;
    if (cmd.count("--affinity")) config.affinity = cbtrack::affinity_from_string(affinity);
    if (cmd.count("--threshold")) {
      config.match_threshold = threshold;
    } else if (config_opt && !config_path.empty()) {
      // keep the file's value
    } else if (config.affinity == cbtrack::AffinityKind::giou ||
               config.affinity == cbtrack::AffinityKind::diou) {
      config.match_threshold = 0.5;
    }
    config.validate();
    return config;
  }
};

int run_track(const std::string& dets_path, const std::string& out_path,
              const cbtrack::TrackerConfig& config) {
  const auto detections = cbtrack::read_detections(dets_path);
  const auto start = std::chrono::steady_clock::now();
  const auto tracklets = cbtrack::run_sequence(config, detections);
  const double elapsed = seconds_since(start);
  cbtrack::write_tracklets(out_path, tracklets);
  const int frames = detections.empty()
                         ? 0
                         : detections.rbegin()->first - detections.begin()->first + 1;
  std::cerr << "tracklets: " << tracklets.size() << "\n"
            << "fps: " << (elapsed > 0 ? frames / elapsed : 0.0) << "\n";
  return 0;
}

int run_link(const std::string& tracks_path, const std::string& dets_path,
             const std::string& emb_path, double cut, const std::string& out_path,
             const std::string& dump_prefix, int jobs) {
  const auto detections = cbtrack::read_detections(dets_path);
  std::int64_t det_count = 0;
  // frame -> exact box -> detection rows in file order
  std::map<int, std::map<std::array<double, 4>, std::deque<std::int64_t>>> by_box;
  for (const auto& [frame, dets] : detections) {
    for (const auto& d : dets) {
      by_box[frame][{d.box.left, d.box.top, d.box.width, d.box.height}].push_back(d.row);
      ++det_count;
    }
  }

  const cbtrack::EmbeddingTable embeddings = cbtrack::read_embeddings(emb_path);
  if (embeddings.rows() != det_count) {
    throw std::runtime_error("embedding rows (" + std::to_string(embeddings.rows()) +
                             ") do not match detection records (" +
                             std::to_string(det_count) + ")");
  }

  auto tracklets = cbtrack::tracklets_from_annotations(cbtrack::read_annotations(tracks_path));
  for (auto& t : tracklets) {
    for (auto& e : t.entries) {
      auto frame_it = by_box.find(e.frame);
      if (frame_it != by_box.end()) {
        auto box_it =
            frame_it->second.find({e.box.left, e.box.top, e.box.width, e.box.height});
        if (box_it != frame_it->second.end() && !box_it->second.empty()) {
          e.row = box_it->second.front();
          box_it->second.pop_front();
          continue;
        }
      }
      throw std::runtime_error("track box in frame " + std::to_string(e.frame + 1) +
                               " has no matching detection; tracks and detections are misaligned");
    }
  }

  auto dump_matrix = [](const std::filesystem::path& path, const cbtrack::DistanceMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << ',';
        out << cbtrack::format_number(m(i, j));
      }
      out << '\n';
    }
  };

  const cbtrack::DistanceMatrix pre = cbtrack::build_distance_matrix(tracklets, embeddings, jobs);
  if (!dump_prefix.empty()) dump_matrix(dump_prefix + ".pre.csv", pre);

  const auto assignment = cbtrack::cluster_average_linkage(pre, cut);
  const auto merged = cbtrack::merge_tracklets(tracklets, assignment);
  cbtrack::write_tracklets(out_path, merged);

  if (!dump_prefix.empty()) {
    dump_matrix(dump_prefix + ".post.csv",
                cbtrack::build_distance_matrix(merged, embeddings, jobs));
  }
  std::cerr << "tracklets: " << tracklets.size() << " -> " << merged.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded buffer-IoU multi-object tracking toolkit"};
  app.require_subcommand(1);

  // ---- track ----
  auto* track = app.add_subcommand("track", "run the online tracker over a detection file");
  std::string track_dets, track_out;
  int track_jobs = 1;
  TrackerCli track_cfg;
  track->add_option("--dets", track_dets, "detection file (MOT CSV)")->required();
  track->add_option("--out", track_out, "output track file")->required();
  track_cfg.attach(*track);
  track->add_option("--jobs", track_jobs, "parallelism degree (output-invariant)");

  // ---- link ----
  auto* link = app.add_subcommand("link", "merge tracklets offline via appearance clustering");
  std::string link_tracks, link_dets, link_emb, link_out, link_dump;
  double link_cut = 0.15;
  int link_jobs = 1;
  link->add_option("--tracks", link_tracks, "online tracker output (MOT CSV)")->required();
  link->add_option("--dets", link_dets, "detection file the tracks were built from")->required();
  link->add_option("--emb", link_emb, "embedding file (EMB1)")->required();
  link->add_option("--out", link_out, "merged track output")->required();
  link->add_option("--cut", link_cut, "clustering cut threshold")->capture_default_str();
  link->add_option("--dump-distance", link_dump,
                   "prefix for <prefix>.pre.csv / <prefix>.post.csv distance dumps");
  link->add_option("--jobs", link_jobs, "threads for distance computation");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::string eval_gt, eval_pred, eval_list;
  double eval_gate = 0.5;
  int eval_jobs = 1;
  eval->add_option("--gt", eval_gt, "ground-truth file");
  eval->add_option("--pred", eval_pred, "prediction file");
  eval->add_option("--seq-list", eval_list, "CSV list of gt_path,pred_path pairs");
  eval->add_option("--gate", eval_gate, "IoU gate for MOTA/IDF1")->capture_default_str();
  eval->add_option("--jobs", eval_jobs, "sequences evaluated in parallel");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "measure online tracking throughput");
  std::string bench_dets;
  int bench_repeat = 5;
  int bench_jobs = 1;
  TrackerCli bench_cfg;
  bench->add_option("--dets", bench_dets, "detection file")->required();
  bench->add_option("--repeat", bench_repeat, "timed runs")->capture_default_str();
  bench_cfg.attach(*bench);
  bench->add_option("--jobs", bench_jobs, "accepted for uniformity; timing is single-threaded");

  // ---- gridsearch ----
  auto* grid = app.add_subcommand("gridsearch", "HOTA over a buffer-scale grid");
  std::string grid_gt, grid_dets, grid_list, grid_spec = "0.3:1.0:0.1";
  double grid_threshold = 0.01;
  int grid_max_age = 60;
  int grid_jobs = 1;
  grid->add_option("--gt", grid_gt, "ground-truth file");
  grid->add_option("--dets", grid_dets, "detection file");
  grid->add_option("--seq-list", grid_list, "CSV list of gt_path,dets_path pairs");
  grid->add_option("--grid", grid_spec, "buffer axis as lo:hi:step")->capture_default_str();
  grid->add_option("--threshold", grid_threshold, "match threshold")->capture_default_str();
  grid->add_option("--max-age", grid_max_age, "track max age")->capture_default_str();
  grid->add_option("--jobs", grid_jobs, "grid cells evaluated in parallel");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic scene");
  cbtrack::SceneSpec spec;
  std::string synth_profile = "linear";
  std::vector<std::string> synth_exits;
  std::string out_gt, out_dets, out_emb;
  int synth_jobs = 1;
  synth->add_option("--seed", spec.seed, "scene seed")->capture_default_str();
  synth->add_option("--objects", spec.n_objects, "object count")->capture_default_str();
  synth->add_option("--frames", spec.n_frames, "frame count")->capture_default_str();
  synth->add_option("--width", spec.field_width, "field width in pixels")->capture_default_str();
  synth->add_option("--height", spec.field_height, "field height in pixels")->capture_default_str();
  synth->add_option("--profile", synth_profile, "linear|piecewise|dash")->capture_default_str();
  synth->add_option("--turn-prob", spec.turn_probability, "piecewise turn probability")
      ->capture_default_str();
  synth->add_option("--exit", synth_exits,
                    "absence as object:first:last (0-based object, 1-based inclusive frames); repeatable");
  synth->add_option("--dim", spec.embedding_dim, "embedding dimension")->capture_default_str();
  synth->add_option("--separation", spec.center_separation, "identity center separation")
      ->capture_default_str();
  synth->add_option("--noise", spec.noise_scale, "appearance noise bound")->capture_default_str();
  synth->add_option("--out-gt", out_gt, "ground-truth output")->required();
  synth->add_option("--out-dets", out_dets, "detection output")->required();
  synth->add_option("--out-emb", out_emb, "embedding output")->required();
  synth->add_option("--jobs", synth_jobs, "accepted for uniformity; generation is sequential");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*track) {
      return run_track(track_dets, track_out, track_cfg.resolve(*track));
    }
    if (*link) {
      return run_link(link_tracks, link_dets, link_emb, link_cut, link_out, link_dump,
                      link_jobs);
    }
    if (*eval) {
      std::vector<std::pair<cbtrack::FrameAnnotations, cbtrack::FrameAnnotations>> sequences;
      if (!eval_list.empty()) {
        for (const auto& [gt_path, pred_path] : read_pair_list(eval_list)) {
          sequences.emplace_back(cbtrack::read_annotations(gt_path),
                                 cbtrack::read_annotations(pred_path));
        }
      } else if (!eval_gt.empty() && !eval_pred.empty()) {
        sequences.emplace_back(cbtrack::read_annotations(eval_gt),
                               cbtrack::read_annotations(eval_pred));
      } else {
        throw std::runtime_error("eval needs --gt and --pred, or --seq-list");
      }
      const auto report = cbtrack::evaluate_sequences(sequences, eval_gate, eval_jobs);
      std::cout << "hota,deta,assa,mota,idf1\n" << metrics_csv(report) << "\n";
      return 0;
    }
    if (*bench) {
      const auto config = bench_cfg.resolve(*bench);
      if (bench_repeat < 1) throw std::runtime_error("--repeat must be >= 1");
      const auto detections = cbtrack::read_detections(bench_dets);
      const int frames = detections.empty()
                             ? 0
                             : detections.rbegin()->first - detections.begin()->first + 1;
      std::vector<double> fps;
      for (int r = 0; r < bench_repeat; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const auto tracklets = cbtrack::run_sequence(config, detections);
        const double elapsed = seconds_since(start);
        fps.push_back(elapsed > 0 ? frames / elapsed : 0.0);
        std::cerr << "run " << (r + 1) << ": " << fps.back() << " fps ("
                  << tracklets.size() << " tracklets)\n";
      }
      std::sort(fps.begin(), fps.end());
      const double median = fps[fps.size() / 2];
      char buf[96];
      std::snprintf(buf, sizeof(buf), "fps_min,fps_median\n%.1f,%.1f\n", fps.front(), median);
      std::cout << buf;
      return 0;
    }
    if (*grid) {
      std::vector<cbtrack::SequenceData> sequences;
      if (!grid_list.empty()) {
        for (const auto& [gt_path, dets_path] : read_pair_list(grid_list)) {
          sequences.push_back(cbtrack::SequenceData{cbtrack::read_annotations(gt_path),
                                                    cbtrack::read_detections(dets_path)});
        }
      } else if (!grid_gt.empty() && !grid_dets.empty()) {
        sequences.push_back(cbtrack::SequenceData{cbtrack::read_annotations(grid_gt),
                                                  cbtrack::read_detections(grid_dets)});
      } else {
        throw std::runtime_error("gridsearch needs --gt and --dets, or --seq-list");
      }
      const auto axis = parse_grid_axis(grid_spec);
      std::vector<std::pair<double, double>> cells;
      for (const double s : axis) {
        for (const double l : axis) {
          if (s <= l) cells.emplace_back(s, l);
        }
      }
      const auto result =
          cbtrack::grid_search(sequences, cells, grid_threshold, grid_max_age, grid_jobs);
      std::cout << "buffer_small,buffer_large,hota,is_best\n";
      for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& cell = result.cells[i];
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%d\n",
                      cbtrack::format_number(cell.buffer_small).c_str(),
                      cbtrack::format_number(cell.buffer_large).c_str(),
                      100.0 * cell.report.hota, i == result.best_index ? 1 : 0);
        std::cout << buf;
      }
      return 0;
    }
    if (*synth) {
      if (synth_profile == "linear") {
        spec.profile = cbtrack::MotionProfile::linear;
      } else if (synth_profile == "piecewise") {
        spec.profile = cbtrack::MotionProfile::piecewise_linear;
      } else if (synth_profile == "dash") {
        spec.profile = cbtrack::MotionProfile::fast_dash;
      } else {
        throw std::runtime_error("unknown profile: " + synth_profile);
      }
      for (const auto& text : synth_exits) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (a == std::string::npos || b == std::string::npos) {
          throw std::runtime_error("--exit must be object:first:last, got '" + text + "'");
        }
        cbtrack::AbsenceInterval interval;
        interval.object = std::stoi(text.substr(0, a));
        interval.first_frame = std::stoi(text.substr(a + 1, b - a - 1)) - 1;
        interval.last_frame = std::stoi(text.substr(b + 1)) - 1;
        spec.absences.push_back(interval);
      }
      const auto scene = cbtrack::generate(spec);
      cbtrack::write_annotations(out_gt, scene.ground_truth);
      cbtrack::write_detections(out_dets, scene.detections);
      cbtrack::write_embeddings(out_emb, scene.embeddings);
      std::cerr << "objects: " << spec.n_objects << ", frames: " << spec.n_frames
                << ", detections: " << scene.embeddings.rows() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
