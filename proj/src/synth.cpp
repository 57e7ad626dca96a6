#include <cbtrack/synth.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbtrack {

namespace {

struct ObjectState {
  double w = 0, h = 0;
  double x = 0, y = 0;
  double vx = 0, vy = 0;
};

bool is_absent(const SceneSpec& spec, int object, int frame) {
  for (const auto& a : spec.absences) {
    if (a.object == object && frame >= a.first_frame && frame <= a.last_frame) return true;
  }
  return false;
}

void bounce_axis(double& pos, double& vel, double extent, double limit) {
  double next = pos + vel;
  if (next < 0.0 || next + extent > limit) {
    vel = -vel;
    next = pos + vel;
  }
  pos = std::clamp(next, 0.0, std::max(0.0, limit - extent));
}

void redraw_velocity(ObjectState& obj, SplitMix64& rng) {
  const double speed = rng.next_in(1.0, 4.0);
  // Direction from a unit draw; avoids transcendentals by picking one of
  // 16 compass headings, which is plenty for turn variety.
  static constexpr double kHeadings[16][2] = {
      {1, 0},       {0.9239, 0.3827},   {0.7071, 0.7071},   {0.3827, 0.9239},
      {0, 1},       {-0.3827, 0.9239},  {-0.7071, 0.7071},  {-0.9239, 0.3827},
      {-1, 0},      {-0.9239, -0.3827}, {-0.7071, -0.7071}, {-0.3827, -0.9239},
      {0, -1},      {0.3827, -0.9239},  {0.7071, -0.7071},  {0.9239, -0.3827}};
  const std::uint64_t pick = rng.next() & 15ULL;
  obj.vx = speed * kHeadings[pick][0];
  obj.vy = speed * kHeadings[pick][1];
}

}  // namespace

void SceneSpec::validate() const {
  if (n_objects < 1) throw std::invalid_argument("n_objects must be >= 1");
  if (n_frames < 1) throw std::invalid_argument("n_frames must be >= 1");
  if (!(field_width > 0.0) || !(field_height > 0.0)) {
    throw std::invalid_argument("field extents must be positive");
  }
  if (!(turn_probability >= 0.0 && turn_probability <= 1.0)) {
    throw std::invalid_argument("turn_probability must lie in [0, 1]");
  }
  if (embedding_dim < 1) throw std::invalid_argument("embedding_dim must be >= 1");
  if (!(center_separation > 0.0)) {
    throw std::invalid_argument("center_separation must be positive");
  }
  if (!(noise_scale >= 0.0) || !(noise_scale < 0.5 * center_separation)) {
    throw std::invalid_argument("noise_scale must be >= 0 and below half the center separation");
  }
  std::vector<std::vector<std::pair<int, int>>> per_object(static_cast<std::size_t>(n_objects));
  for (const auto& a : absences) {
    if (a.object < 0 || a.object >= n_objects) {
      throw std::invalid_argument("absence interval references unknown object");
    }
    if (a.first_frame < 0 || a.last_frame >= n_frames || a.first_frame > a.last_frame) {
      throw std::invalid_argument("absence interval outside the frame range");
    }
    per_object[static_cast<std::size_t>(a.object)].emplace_back(a.first_frame, a.last_frame);
  }
  for (auto& intervals : per_object) {
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t i = 1; i < intervals.size(); ++i) {
      if (intervals[i].first <= intervals[i - 1].second) {
        throw std::invalid_argument("overlapping absence intervals for one object");
      }
    }
  }
}

Eigen::VectorXf embedding_center(const SceneSpec& spec, int object) {
  Eigen::VectorXf center = Eigen::VectorXf::Zero(spec.embedding_dim);
  const int axis = object % spec.embedding_dim;
  const double multiplier = 1.0 + static_cast<double>(object / spec.embedding_dim);
  center(axis) = static_cast<float>(spec.center_separation * multiplier);
  return center;
}

SynthScene generate(const SceneSpec& spec) {
  spec.validate();

  // Three decoupled streams so the draw order is easy to document and
  // reproduce: object initialization, per-frame motion, appearance noise.
  SplitMix64 rng_init(spec.seed);
  SplitMix64 rng_motion(spec.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  SplitMix64 rng_appearance(spec.seed ^ 0x5C5C5C5C5C5C5C5CULL);

  const bool lanes = spec.profile != MotionProfile::piecewise_linear;
  const double lane_height = spec.field_height / spec.n_objects;

  std::vector<ObjectState> objects(static_cast<std::size_t>(spec.n_objects));
  for (int k = 0; k < spec.n_objects; ++k) {
    ObjectState& obj = objects[static_cast<std::size_t>(k)];
    obj.h = rng_init.next_in(16.0, 40.0);
    obj.w = rng_init.next_in(14.0, 34.0);
    if (lanes) {
      // Cap so that boxes buffered by up to scale 1 (3x the extent) from
      // adjacent lanes still cannot touch.
      obj.h = std::min(obj.h, lane_height / 3.2);
      obj.y = (static_cast<double>(k) + 0.5) * lane_height - 0.5 * obj.h;
      obj.vy = 0.0;
      if (spec.profile == MotionProfile::fast_dash) {
        obj.x = rng_init.next_in(0.0, std::max(1.0, 0.05 * spec.field_width));
        obj.vx = rng_init.next_in(1.15, 1.75) * obj.w;  // consecutive boxes disjoint
      } else {
        obj.x = rng_init.next_in(0.0, std::max(1.0, spec.field_width - obj.w));
        const double speed = rng_init.next_in(0.5, 3.0);
        obj.vx = (rng_init.next() & 1ULL) ? speed : -speed;
      }
    } else {
      obj.x = rng_init.next_in(0.0, std::max(1.0, spec.field_width - obj.w));
      obj.y = rng_init.next_in(0.0, std::max(1.0, spec.field_height - obj.h));
      redraw_velocity(obj, rng_init);
    }
    obj.x = std::clamp(obj.x, 0.0, std::max(0.0, spec.field_width - obj.w));
    obj.y = std::clamp(obj.y, 0.0, std::max(0.0, spec.field_height - obj.h));
  }

  SynthScene scene;
  std::vector<Eigen::VectorXf> rows;
  std::int64_t next_row = 0;

  auto emit = [&](int frame, int k, const ObjectState& obj) {
    const Box box{obj.x, obj.y, obj.w, obj.h};
    scene.ground_truth[frame].push_back(IdBox{k + 1, box});
    scene.detections[frame].push_back(Detection{box, 1.0, next_row});
    scene.detection_identity.push_back(k + 1);
    Eigen::VectorXd noise(spec.embedding_dim);
    for (int c = 0; c < spec.embedding_dim; ++c) {
      noise(c) = rng_appearance.next_in(-1.0, 1.0);
    }
    noise *= spec.noise_scale / std::max(1.0, noise.norm());
    rows.push_back(embedding_center(spec, k) + noise.cast<float>());
    ++next_row;
  };

  for (int frame = 0; frame < spec.n_frames; ++frame) {
    if (frame > 0) {
      for (int k = 0; k < spec.n_objects; ++k) {
        ObjectState& obj = objects[static_cast<std::size_t>(k)];
        if (spec.profile == MotionProfile::piecewise_linear) {
          if (rng_motion.next_unit() < spec.turn_probability) {
            redraw_velocity(obj, rng_motion);
          }
          bounce_axis(obj.y, obj.vy, obj.h, spec.field_height);
        }
        bounce_axis(obj.x, obj.vx, obj.w, spec.field_width);
      }
    }
    for (int k = 0; k < spec.n_objects; ++k) {
      if (!is_absent(spec, k, frame)) {
        emit(frame, k, objects[static_cast<std::size_t>(k)]);
      }
    }
  }

  scene.embeddings.features.resize(static_cast<Eigen::Index>(rows.size()), spec.embedding_dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    scene.embeddings.features.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return scene;
}

}  // namespace cbtrack
