#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbtrack {

/// Axis-aligned rectangle in continuous pixel coordinates, stored as
/// top-left corner plus extent. Area is width*height with no +1 pixel
/// correction. A box is valid when both extents are strictly positive
/// and all coordinates are finite.
struct Box {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  double center_x() const { return left + 0.5 * width; }
  double center_y() const { return top + 0.5 * height; }

  bool valid() const {
    return width > 0.0 && height > 0.0 && std::isfinite(left) &&
           std::isfinite(top) && std::isfinite(width) && std::isfinite(height);
  }

  friend bool operator==(const Box&, const Box&) = default;
};

inline void require_valid(const Box& b) {
  if (!b.valid()) {
    throw std::invalid_argument("invalid box: extents must be positive and coordinates finite");
  }
}

/// Relative buffer applied symmetrically around a box: each side moves
/// outward by scale*extent, so the expanded box keeps its center and
/// grows by a factor of (1 + 2*scale) per dimension. Scale 0 is the
/// identity.
class BufferScale {
 public:
  BufferScale() = default;
  explicit BufferScale(double value) : value_(value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("buffer scale must be finite and >= 0");
    }
  }
  double value() const { return value_; }

  friend bool operator==(const BufferScale&, const BufferScale&) = default;

 private:
  double value_ = 0.0;
};

namespace detail {

struct Overlap {
  double intersection = 0.0;
  double union_area = 0.0;
};

inline Overlap overlap(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  return {inter, a.area() + b.area() - inter};
}

}  // namespace detail

/// Intersection over union in [0, 1]; 0 for disjoint boxes. Clamped at 1
/// so rounding on near-identical boxes cannot push the score above range.
inline double iou(const Box& a, const Box& b) {
  require_valid(a);
  require_valid(b);
  const auto ov = detail::overlap(a, b);
  return ov.intersection == 0.0 ? 0.0 : std::min(1.0, ov.intersection / ov.union_area);
}

/// Expands a box by scale*width / scale*height per side; center preserved.
inline Box buffered(const Box& box, BufferScale scale) {
  require_valid(box);
  const double b = scale.value();
  return Box{box.left - b * box.width, box.top - b * box.height,
             box.width * (1.0 + 2.0 * b), box.height * (1.0 + 2.0 * b)};
}

/// Buffered IoU: plain IoU of the two expanded boxes. Nearby disjoint
/// boxes score above zero once the buffers bridge the gap, and
/// biou(a, b, 0) == iou(a, b) exactly.
inline double biou(const Box& a, const Box& b, BufferScale scale) {
  return iou(buffered(a, scale), buffered(b, scale));
}

/// Generalized IoU in (-1, 1]: IoU minus the fraction of the smallest
/// enclosing box not covered by the union. Equals IoU when the hull
/// equals the union.
inline double giou(const Box& a, const Box& b) {
  require_valid(a);
  require_valid(b);
  const auto ov = detail::overlap(a, b);
  const double hull_w = std::max(a.right(), b.right()) - std::min(a.left, b.left);
  const double hull_h = std::max(a.bottom(), b.bottom()) - std::min(a.top, b.top);
  const double hull = hull_w * hull_h;
  const double iou_score =
      ov.intersection == 0.0 ? 0.0 : std::min(1.0, ov.intersection / ov.union_area);
  return std::min(1.0, iou_score - (hull - ov.union_area) / hull);
}

/// Distance IoU in (-1, 1]: IoU minus the squared center distance
/// normalized by the squared diagonal of the enclosing box.
inline double diou(const Box& a, const Box& b) {
  require_valid(a);
  require_valid(b);
  const auto ov = detail::overlap(a, b);
  const double hull_w = std::max(a.right(), b.right()) - std::min(a.left, b.left);
  const double hull_h = std::max(a.bottom(), b.bottom()) - std::min(a.top, b.top);
  const double dx = a.center_x() - b.center_x();
  const double dy = a.center_y() - b.center_y();
  const double iou_score =
      ov.intersection == 0.0 ? 0.0 : std::min(1.0, ov.intersection / ov.union_area);
  return iou_score - (dx * dx + dy * dy) / (hull_w * hull_w + hull_h * hull_h);
}

}  // namespace cbtrack
