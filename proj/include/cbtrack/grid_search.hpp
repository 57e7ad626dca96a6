#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <cbtrack/detection.hpp>
#include <cbtrack/metrics.hpp>
#include <cbtrack/tracker.hpp>

namespace cbtrack {

/// One sequence of oracle detections with its ground truth.
struct SequenceData {
  FrameAnnotations ground_truth;
  std::map<int, std::vector<Detection>> detections;
};

struct GridCell {
  double buffer_small = 0.0;
  double buffer_large = 0.0;
  MetricReport report;
};

struct GridSearchResult {
  std::vector<GridCell> cells;  // grid order
  std::size_t best_index = 0;   // highest HOTA, first on ties
};

/// Runs the cascaded tracker over every (buffer_small, buffer_large) grid
/// cell, scoring each by HOTA pooled across the sequences. Cells may be
/// evaluated in parallel; the result is schedule-independent.
GridSearchResult grid_search(const std::vector<SequenceData>& sequences,
                             const std::vector<std::pair<double, double>>& grid,
                             double match_threshold, int max_age = 60, int jobs = 1);

}  // namespace cbtrack
