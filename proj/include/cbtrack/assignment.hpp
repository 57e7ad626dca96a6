#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cbtrack {

/// Pairwise affinity scores, rows = tracks, cols = detections.
/// All entries must be finite and in [0, 1].
using ScoreMatrix = Eigen::MatrixXd;

struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (row, col), row-ascending
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Minimum-cost assignment over a finite rectangular cost matrix.
/// Exactly min(rows, cols) entries are assigned; the returned vector maps
/// each row to its column, -1 for rows left out. Deterministic: ties are
/// resolved by the fixed row/column scan order.
std::vector<int> assign_min_cost(const Eigen::MatrixXd& cost);

/// Maximum-total-score assignment with a hard feasibility gate: entries
/// below `threshold` are masked out before solving and are never emitted
/// as pairs. Empty matrices yield everything unmatched.
MatchResult match_optimal(const ScoreMatrix& scores, double threshold);

}  // namespace cbtrack
