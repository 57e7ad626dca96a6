#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <cbtrack/detection.hpp>
#include <cbtrack/embedding.hpp>
#include <cbtrack/metrics.hpp>

namespace cbtrack {

/// splitmix64: the public-domain 64-bit mixer (state += 0x9E3779B97F4A7C15,
/// then two xor-shift-multiply rounds). Chosen because a from-scratch
/// reimplementation in any language reproduces the stream bit-exactly.
/// Unit doubles take the top 53 bits / 2^53.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

enum class MotionProfile { linear, piecewise_linear, fast_dash };

/// Frames are 0-based and the interval is inclusive.
struct AbsenceInterval {
  int object = 0;
  int first_frame = 0;
  int last_frame = 0;
};

/// Deterministic scene description. `linear` and `fast_dash` place each
/// object in its own horizontal lane sized so that even large-buffer boxes
/// of different objects can never overlap, making the true association
/// unambiguous; `piecewise_linear` is free 2D motion with random turns.
/// Identity embedding centers sit on scaled coordinate axes separated by
/// at least `center_separation`; per-detection noise is a uniform vector
/// capped at `noise_scale`, which must stay below half the separation.
struct SceneSpec {
  std::uint64_t seed = 1;
  int n_objects = 4;
  int n_frames = 100;
  double field_width = 1920.0;
  double field_height = 1080.0;
  MotionProfile profile = MotionProfile::linear;
  double turn_probability = 0.05;
  std::vector<AbsenceInterval> absences;
  int embedding_dim = 16;
  double center_separation = 10.0;
  double noise_scale = 0.5;

  void validate() const;
};

struct SynthScene {
  FrameAnnotations ground_truth;
  std::map<int, std::vector<Detection>> detections;  // oracle: detections == gt boxes
  EmbeddingTable embeddings;                         // row i = detection row i
  std::vector<int> detection_identity;               // gt id per embedding row
};

/// Identity embedding center used by generate(); exposed so tests can run
/// nearest-center classification without duplicating the construction.
Eigen::VectorXf embedding_center(const SceneSpec& spec, int object);

SynthScene generate(const SceneSpec& spec);

}  // namespace cbtrack
