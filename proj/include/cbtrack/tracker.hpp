#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <cbtrack/box.hpp>
#include <cbtrack/detection.hpp>
#include <cbtrack/motion.hpp>
#include <cbtrack/tracklet.hpp>

namespace cbtrack {

enum class AffinityKind { iou, giou, diou, biou_cascade };

std::string to_string(AffinityKind kind);
AffinityKind affinity_from_string(const std::string& name);

struct TrackerConfig {
  BufferScale buffer_small{0.7};
  BufferScale buffer_large{1.0};
  double match_threshold = 0.01;
  int max_age = 60;
  AffinityKind affinity = AffinityKind::biou_cascade;

  void validate() const {
    if (buffer_small.value() > buffer_large.value()) {
      throw std::invalid_argument("buffer_small must not exceed buffer_large");
    }
    if (!(match_threshold >= 0.0 && match_threshold <= 1.0)) {
      throw std::invalid_argument("match threshold must lie in [0, 1]");
    }
    if (max_age < 1) {
      throw std::invalid_argument("max_age must be >= 1");
    }
  }
};

struct TrackOutput {
  int id = 0;
  Box box;

  friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

/// Online tracker with cascaded matching: detections are first matched to
/// previous-frame tracks using the small buffer scale, then the leftovers
/// are matched against every remaining track (lost ones included) with
/// the large buffer scale. Matched tracks feed the motion model and the
/// history; unmatched tracks coast and die past max_age; unmatched
/// detections found new tracks. The iou/giou/diou affinities are baseline
/// variants sharing the same lifecycle machinery.
///
/// Strictly sequential over one sequence; use one instance per sequence.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  /// Processes one frame. `frame` must be strictly greater than the last
  /// processed frame; skipped frame indices behave like frames with no
  /// detections. Returns (id, box) for matched and newborn tracks only,
  /// id-ascending.
  std::vector<TrackOutput> step(int frame, const std::vector<Detection>& detections);

  /// Flushes live tracks and returns every tracklet ever produced,
  /// id-ascending. The tracker is spent afterwards.
  std::vector<Tracklet> finish();

  int live_track_count() const { return static_cast<int>(tracks_.size()); }

 private:
  struct TrackState {
    int id = 0;
    MotionState motion;
    std::vector<TrackletEntry> history;
    int frames_since_update = 0;
  };

  void age_unmatched(const std::vector<char>& matched);
  double affinity(const Box& predicted, const Box& detection, bool tier_one) const;

  TrackerConfig config_;
  std::vector<TrackState> tracks_;  // creation order
  std::vector<Tracklet> finished_;
  int next_id_ = 1;
  int last_frame_ = 0;
  bool started_ = false;
};

/// Folds Tracker::step over a frame-keyed detection map (gaps between the
/// first and last key are processed as empty frames) and returns the
/// finished tracklets.
std::vector<Tracklet> run_sequence(const TrackerConfig& config,
                                   const std::map<int, std::vector<Detection>>& detections_by_frame);

}  // namespace cbtrack
