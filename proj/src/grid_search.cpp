#include <cbtrack/grid_search.hpp>

#include <mutex>
#include <stdexcept>

#include <cbtrack/parallel.hpp>

namespace cbtrack {

GridSearchResult grid_search(const std::vector<SequenceData>& sequences,
                             const std::vector<std::pair<double, double>>& grid,
                             double match_threshold, int max_age, int jobs) {
  if (grid.empty()) {
    throw std::invalid_argument("grid_search requires a non-empty grid");
  }
  if (sequences.empty()) {
    throw std::invalid_argument("grid_search requires at least one sequence");
  }
  for (const auto& [small, large] : grid) {
    TrackerConfig probe;
    probe.buffer_small = BufferScale(small);
    probe.buffer_large = BufferScale(large);
    probe.match_threshold = match_threshold;
    probe.max_age = max_age;
    probe.validate();
  }

  GridSearchResult result;
  result.cells.resize(grid.size());
  std::exception_ptr error;
  std::mutex error_mutex;
  detail::parallel_for(grid.size(), jobs, [&](std::size_t cell) {
    try {
      TrackerConfig config;
      config.buffer_small = BufferScale(grid[cell].first);
      config.buffer_large = BufferScale(grid[cell].second);
      config.match_threshold = match_threshold;
      config.max_age = max_age;
      config.affinity = AffinityKind::biou_cascade;

      MetricCounts pooled;
      for (const auto& seq : sequences) {
        const auto tracklets = run_sequence(config, seq.detections);
        pooled += evaluate_counts(seq.ground_truth, annotations_from_tracklets(tracklets));
      }
      result.cells[cell] =
          GridCell{grid[cell].first, grid[cell].second, report_from_counts(pooled)};
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  for (std::size_t i = 1; i < result.cells.size(); ++i) {
    if (result.cells[i].report.hota > result.cells[result.best_index].report.hota) {
      result.best_index = i;
    }
  }
  return result;
}

}  // namespace cbtrack
