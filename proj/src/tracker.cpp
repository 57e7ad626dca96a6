#include <cbtrack/tracker.hpp>

#include <algorithm>

#include <cbtrack/assignment.hpp>

namespace cbtrack {

std::string to_string(AffinityKind kind) {
  switch (kind) {
    case AffinityKind::iou: return "iou";
    case AffinityKind::giou: return "giou";
    case AffinityKind::diou: return "diou";
    case AffinityKind::biou_cascade: return "biou_cascade";
  }
  throw std::logic_error("unknown affinity kind");
}

AffinityKind affinity_from_string(const std::string& name) {
  if (name == "iou") return AffinityKind::iou;
  if (name == "giou") return AffinityKind::giou;
  if (name == "diou") return AffinityKind::diou;
  if (name == "biou_cascade" || name == "biou") return AffinityKind::biou_cascade;
  throw std::invalid_argument("unknown affinity kind: " + name);
}

Tracker::Tracker(TrackerConfig config) : config_(config) { config_.validate(); }

double Tracker::affinity(const Box& predicted, const Box& detection, bool tier_one) const {
  switch (config_.affinity) {
    case AffinityKind::biou_cascade:
      return biou(predicted, detection,
                  tier_one ? config_.buffer_small : config_.buffer_large);
    case AffinityKind::iou:
      return iou(predicted, detection);
    case AffinityKind::giou:
      return 0.5 * (giou(predicted, detection) + 1.0);
    case AffinityKind::diou:
      return 0.5 * (diou(predicted, detection) + 1.0);
  }
  throw std::logic_error("unknown affinity kind");
}

void Tracker::age_unmatched(const std::vector<char>& matched) {
  std::vector<TrackState> survivors;
  survivors.reserve(tracks_.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    TrackState& track = tracks_[i];
    if (matched[i]) {
      survivors.push_back(std::move(track));
      continue;
    }
    ++track.frames_since_update;
    track.motion.coast();
    if (track.frames_since_update > config_.max_age) {
      finished_.push_back(Tracklet{track.id, std::move(track.history)});
    } else {
      survivors.push_back(std::move(track));
    }
  }
  tracks_ = std::move(survivors);
}

std::vector<TrackOutput> Tracker::step(int frame, const std::vector<Detection>& detections) {
  if (started_ && frame <= last_frame_) {
    throw std::invalid_argument("frame index must be strictly increasing");
  }
  for (const auto& det : detections) require_valid(det.box);

  // Skipped frames behave like explicit empty frames.
  if (started_) {
    for (int f = last_frame_ + 1; f < frame; ++f) {
      age_unmatched(std::vector<char>(tracks_.size(), 0));
    }
  }
  last_frame_ = frame;
  started_ = true;

  std::vector<Box> predicted(tracks_.size());
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    predicted[i] = tracks_[i].motion.predict();
  }

  std::vector<char> track_matched(tracks_.size(), 0);
  std::vector<char> det_matched(detections.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track, detection)

  const bool cascaded = config_.affinity == AffinityKind::biou_cascade ||
                        config_.affinity == AffinityKind::iou;

  auto run_tier = [&](const std::vector<std::size_t>& track_idx,
                      const std::vector<std::size_t>& det_idx, bool tier_one) {
    if (track_idx.empty() || det_idx.empty()) return;
    ScoreMatrix scores(static_cast<Eigen::Index>(track_idx.size()),
                       static_cast<Eigen::Index>(det_idx.size()));
    for (std::size_t r = 0; r < track_idx.size(); ++r) {
      for (std::size_t c = 0; c < det_idx.size(); ++c) {
        scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            affinity(predicted[track_idx[r]], detections[det_idx[c]].box, tier_one);
      }
    }
    const MatchResult result = match_optimal(scores, config_.match_threshold);
    for (const auto& [r, c] : result.pairs) {
      const std::size_t ti = track_idx[static_cast<std::size_t>(r)];
      const std::size_t di = det_idx[static_cast<std::size_t>(c)];
      track_matched[ti] = 1;
      det_matched[di] = 1;
      matches.emplace_back(ti, di);
    }
  };

  auto unmatched_tracks = [&](bool recent_only) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      if (track_matched[i]) continue;
      if (recent_only && tracks_[i].frames_since_update != 0) continue;
      idx.push_back(i);
    }
    return idx;
  };
  auto unmatched_dets = [&] {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (!det_matched[j]) idx.push_back(j);
    }
    return idx;
  };

  if (cascaded) {
    run_tier(unmatched_tracks(/*recent_only=*/true), unmatched_dets(), /*tier_one=*/true);
    run_tier(unmatched_tracks(/*recent_only=*/false), unmatched_dets(), /*tier_one=*/false);
  } else {
    run_tier(unmatched_tracks(/*recent_only=*/false), unmatched_dets(), /*tier_one=*/false);
  }

  std::vector<TrackOutput> outputs;
  for (const auto& [ti, di] : matches) {
    TrackState& track = tracks_[ti];
    const Detection& det = detections[di];
    track.motion.observe(det.box);
    track.history.push_back(TrackletEntry{frame, det.box, det.row});
    track.frames_since_update = 0;
    outputs.push_back(TrackOutput{track.id, det.box});
  }

  age_unmatched(track_matched);

  for (const std::size_t di : unmatched_dets()) {
    const Detection& det = detections[di];
    TrackState track;
    track.id = next_id_++;
    track.motion.observe(det.box);
    track.history.push_back(TrackletEntry{frame, det.box, det.row});
    track.frames_since_update = 0;
    outputs.push_back(TrackOutput{track.id, det.box});
    tracks_.push_back(std::move(track));
  }

  std::sort(outputs.begin(), outputs.end(),
            [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
  return outputs;
}

std::vector<Tracklet> Tracker::finish() {
  for (auto& track : tracks_) {
    finished_.push_back(Tracklet{track.id, std::move(track.history)});
  }
  tracks_.clear();
  std::sort(finished_.begin(), finished_.end(),
            [](const Tracklet& a, const Tracklet& b) { return a.id < b.id; });
  return std::move(finished_);
}

std::vector<Tracklet> run_sequence(
    const TrackerConfig& config,
    const std::map<int, std::vector<Detection>>& detections_by_frame) {
  Tracker tracker(config);
  if (detections_by_frame.empty()) return tracker.finish();
  static const std::vector<Detection> kEmpty;
  const int first = detections_by_frame.begin()->first;
  const int last = detections_by_frame.rbegin()->first;
  for (int frame = first; frame <= last; ++frame) {
    const auto it = detections_by_frame.find(frame);
    tracker.step(frame, it == detections_by_frame.end() ? kEmpty : it->second);
  }
  return tracker.finish();
}

}  // namespace cbtrack
