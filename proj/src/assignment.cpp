#include <cbtrack/assignment.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbtrack {

namespace {

// Hungarian algorithm with row/column potentials, O(rows * cols^2).
// Requires rows <= cols; every row gets a column.
std::vector<int> solve_rows_leq_cols(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  const double kInf = std::numeric_limits<double>::infinity();

  // 1-based internally; col_owner[j] = row currently assigned to column j.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> col_owner(m + 1, 0), path(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    col_owner[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = col_owner[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          path[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_owner[j0] != 0);
    do {
      const int j1 = path[j0];
      col_owner[j0] = col_owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (col_owner[j] != 0) row_to_col[col_owner[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<int> assign_min_cost(const Eigen::MatrixXd& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) {
    return std::vector<int>(static_cast<std::size_t>(cost.rows()), -1);
  }
  if (!cost.allFinite()) {
    throw std::invalid_argument("assignment cost matrix must be finite");
  }
  if (cost.rows() <= cost.cols()) {
    return solve_rows_leq_cols(cost);
  }
  const std::vector<int> col_to_row = solve_rows_leq_cols(cost.transpose());
  std::vector<int> row_to_col(static_cast<std::size_t>(cost.rows()), -1);
  for (std::size_t j = 0; j < col_to_row.size(); ++j) {
    row_to_col[static_cast<std::size_t>(col_to_row[j])] = static_cast<int>(j);
  }
  return row_to_col;
}

MatchResult match_optimal(const ScoreMatrix& scores, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("match threshold must lie in [0, 1]");
  }
  const int rows = static_cast<int>(scores.rows());
  const int cols = static_cast<int>(scores.cols());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double s = scores(i, j);
      if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
        throw std::invalid_argument("score matrix entries must be finite and in [0, 1]");
      }
    }
  }

  MatchResult result;
  if (rows == 0 || cols == 0) {
    for (int i = 0; i < rows; ++i) result.unmatched_rows.push_back(i);
    for (int j = 0; j < cols; ++j) result.unmatched_cols.push_back(j);
    return result;
  }

  // Sub-threshold entries act like score 0: the solver may still route
  // through them to complete a matching, but they are dropped below, which
  // is equivalent to leaving both endpoints unmatched.
  Eigen::MatrixXd cost(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double s = scores(i, j);
      cost(i, j) = 1.0 - (s >= threshold ? s : 0.0);
    }
  }

  const std::vector<int> row_to_col = assign_min_cost(cost);
  std::vector<bool> col_matched(static_cast<std::size_t>(cols), false);
  for (int i = 0; i < rows; ++i) {
    const int j = row_to_col[static_cast<std::size_t>(i)];
    if (j >= 0 && scores(i, j) >= threshold) {
      result.pairs.emplace_back(i, j);
      col_matched[static_cast<std::size_t>(j)] = true;
    } else {
      result.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < cols; ++j) {
    if (!col_matched[static_cast<std::size_t>(j)]) result.unmatched_cols.push_back(j);
  }
  return result;
}

}  // namespace cbtrack
