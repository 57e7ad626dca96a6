#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <cbtrack/box.hpp>

namespace cbtrack {

struct TrackletEntry {
  int frame = 0;
  Box box;
  std::int64_t row = -1;  // detection record / embedding row, -1 if unknown

  friend bool operator==(const TrackletEntry&, const TrackletEntry&) = default;
};

/// An identity fragment: one box per covered frame, frames strictly
/// increasing. The temporal range is exactly the set of entry frames;
/// coasted frames leave holes.
struct Tracklet {
  int id = 0;
  std::vector<TrackletEntry> entries;

  int first_frame() const { return entries.front().frame; }
  int last_frame() const { return entries.back().frame; }
  std::size_t size() const { return entries.size(); }

  friend bool operator==(const Tracklet&, const Tracklet&) = default;
};

inline void require_strictly_increasing(const Tracklet& t) {
  for (std::size_t i = 1; i < t.entries.size(); ++i) {
    if (t.entries[i].frame <= t.entries[i - 1].frame) {
      throw std::invalid_argument("tracklet frames must be strictly increasing");
    }
  }
}

/// True when the two temporal ranges share at least one frame.
/// Entries must be frame-sorted; runs as a linear merge walk.
inline bool temporally_overlap(const Tracklet& a, const Tracklet& b) {
  if (a.entries.empty() || b.entries.empty()) return false;
  if (a.last_frame() < b.first_frame() || b.last_frame() < a.first_frame()) return false;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    const int fa = a.entries[i].frame;
    const int fb = b.entries[j].frame;
    if (fa == fb) return true;
    if (fa < fb) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

}  // namespace cbtrack
