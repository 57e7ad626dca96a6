#pragma once

#include <cstdint>

#include <cbtrack/box.hpp>

namespace cbtrack {

/// One per-frame observation. `row` is the 0-based record ordinal in the
/// detection file the observation came from; it doubles as the row index
/// into the companion embedding table. In-memory sources (synth) assign
/// rows in emission order.
struct Detection {
  Box box;
  double conf = 1.0;
  std::int64_t row = -1;

  friend bool operator==(const Detection&, const Detection&) = default;
};

}  // namespace cbtrack
