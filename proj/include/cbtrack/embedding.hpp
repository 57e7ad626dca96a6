#pragma once

#include <Eigen/Core>

namespace cbtrack {

/// Per-detection appearance features, row i belonging to detection record
/// i of the companion detection file. Stored row-major in float32, the
/// on-disk precision.
struct EmbeddingTable {
  using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Matrix features;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  bool empty() const { return features.rows() == 0; }
};

}  // namespace cbtrack
