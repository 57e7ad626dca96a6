#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include <cbtrack/box.hpp>

namespace cbtrack {

struct Displacement {
  double dx = 0.0;
  double dy = 0.0;

  friend bool operator==(const Displacement&, const Displacement&) = default;
};

/// Constant-velocity motion model without a Kalman filter: the velocity
/// estimate is the mean of the displacements observed over the previous
/// two frames, so it reacts immediately to motion changes. While a track
/// goes unmatched the prediction keeps advancing by the frozen mean
/// velocity, one step per coasted frame; coasting never feeds back into
/// the displacement window.
///
/// MotionState is a plain value: copy it to fork a hypothesis.
class MotionState {
 public:
  /// Records a matched box. Pushes the top-left displacement since the
  /// previous observation into the two-deep window (raw delta, even after
  /// coasted frames) and resets the coast counter.
  void observe(const Box& box) {
    require_valid(box);
    if (last_box_) {
      push(Displacement{box.left - last_box_->left, box.top - last_box_->top});
    }
    last_box_ = box;
    frames_coasted_ = 0;
  }

  /// Marks one unmatched frame. The displacement window is untouched.
  void coast() { ++frames_coasted_; }

  /// Predicted box for the next frame: the last observed box translated
  /// by (frames_coasted + 1) times the mean stored displacement. Extent
  /// is never extrapolated. Zero velocity until the second observation.
  Box predict() const {
    if (!last_box_) {
      throw std::logic_error("predict() requires at least one observation");
    }
    const Displacement v = mean_displacement();
    const double steps = static_cast<double>(frames_coasted_ + 1);
    return Box{last_box_->left + steps * v.dx, last_box_->top + steps * v.dy,
               last_box_->width, last_box_->height};
  }

  Displacement mean_displacement() const {
    if (count_ == 0) return {};
    Displacement m;
    for (std::size_t i = 0; i < count_; ++i) {
      m.dx += window_[i].dx;
      m.dy += window_[i].dy;
    }
    m.dx /= static_cast<double>(count_);
    m.dy /= static_cast<double>(count_);
    return m;
  }

  bool has_observation() const { return last_box_.has_value(); }
  const Box& last_box() const { return *last_box_; }
  int frames_coasted() const { return frames_coasted_; }

  std::size_t displacement_count() const { return count_; }
  Displacement displacement(std::size_t i) const { return window_[i]; }

 private:
  void push(const Displacement& d) {
    if (count_ < 2) {
      window_[count_++] = d;
    } else {
      window_[0] = window_[1];
      window_[1] = d;
    }
  }

  std::optional<Box> last_box_;
  std::array<Displacement, 2> window_{};
  std::size_t count_ = 0;
  int frames_coasted_ = 0;
};

}  // namespace cbtrack
