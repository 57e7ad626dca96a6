#include <cbtrack/linker.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include <cbtrack/parallel.hpp>

namespace cbtrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mean of the L2-normalized feature rows of a tracklet, in double
// precision. Not re-normalized: its dot product with another tracklet's
// mean equals the average pairwise cosine.
Eigen::VectorXd mean_normalized(const Tracklet& t, const EmbeddingTable& emb) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(emb.dim());
  for (const auto& entry : t.entries) {
    if (entry.row < 0 || entry.row >= emb.rows()) {
      throw std::invalid_argument("tracklet references missing embedding row " +
                                  std::to_string(entry.row));
    }
    const Eigen::VectorXd f = emb.features.row(static_cast<Eigen::Index>(entry.row))
                                  .transpose()
                                  .cast<double>();
    const double norm = f.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::invalid_argument("embedding row " + std::to_string(entry.row) +
                                  " has zero or non-finite norm");
    }
    mean += f / norm;
  }
  return mean / static_cast<double>(t.entries.size());
}

}  // namespace

double tracklet_distance(const Tracklet& a, const Tracklet& b, const EmbeddingTable& emb) {
  if (a.entries.empty() || b.entries.empty()) {
    throw std::invalid_argument("tracklet_distance requires non-empty tracklets");
  }
  if (temporally_overlap(a, b)) return kInf;
  const double d = 1.0 - mean_normalized(a, emb).dot(mean_normalized(b, emb));
  return std::clamp(d, 0.0, 2.0);
}

DistanceMatrix build_distance_matrix(const std::vector<Tracklet>& tracklets,
                                     const EmbeddingTable& emb, int jobs) {
  const Eigen::Index n = static_cast<Eigen::Index>(tracklets.size());
  DistanceMatrix d = DistanceMatrix::Zero(n, n);
  if (n == 0) return d;

  std::vector<Eigen::VectorXd> means(tracklets.size());
  std::exception_ptr error;
  std::mutex error_mutex;
  detail::parallel_for(tracklets.size(), jobs, [&](std::size_t i) {
    try {
      means[i] = mean_normalized(tracklets[i], emb);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  detail::parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < static_cast<std::size_t>(n); ++j) {
      const double dist =
          temporally_overlap(tracklets[i], tracklets[j])
              ? kInf
              : std::clamp(1.0 - means[i].dot(means[j]), 0.0, 2.0);
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dist;
      d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = dist;
    }
  });
  return d;
}

std::vector<int> cluster_average_linkage(const DistanceMatrix& distances, double cut) {
  const Eigen::Index n = distances.rows();
  if (distances.cols() != n) {
    throw std::invalid_argument("distance matrix must be square");
  }
  if (!(cut >= 0.0) || !std::isfinite(cut)) {
    throw std::invalid_argument("cut must be finite and >= 0");
  }

  DistanceMatrix d = distances;
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {static_cast<int>(i)};

  // Merged clusters live at the slot of their smallest member, so the
  // ascending (i, j) scan with a strict < also implements the tie-break.
  while (true) {
    double best = kInf;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        if (d(i, j) < best) {
          best = d(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0 || !(best < cut)) break;

    for (Eigen::Index k = 0; k < n; ++k) {
      if (!active[static_cast<std::size_t>(k)] || k == bi || k == bj) continue;
      const double merged = (size[static_cast<std::size_t>(bi)] * d(bi, k) +
                             size[static_cast<std::size_t>(bj)] * d(bj, k)) /
                            (size[static_cast<std::size_t>(bi)] + size[static_cast<std::size_t>(bj)]);
      d(bi, k) = merged;
      d(k, bi) = merged;
    }
    size[static_cast<std::size_t>(bi)] += size[static_cast<std::size_t>(bj)];
    auto& dst = members[static_cast<std::size_t>(bi)];
    auto& src = members[static_cast<std::size_t>(bj)];
    dst.insert(dst.end(), src.begin(), src.end());
    src.clear();
    active[static_cast<std::size_t>(bj)] = false;
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  int next_cluster = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    for (const int member : members[static_cast<std::size_t>(i)]) {
      assignment[static_cast<std::size_t>(member)] = next_cluster;
    }
    ++next_cluster;
  }
  return assignment;
}

std::vector<Tracklet> merge_tracklets(const std::vector<Tracklet>& tracklets,
                                      const std::vector<int>& assignment) {
  if (assignment.size() != tracklets.size()) {
    throw std::invalid_argument("assignment size must match tracklet count");
  }
  std::map<int, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    clusters[assignment[i]].push_back(i);
  }

  std::vector<Tracklet> merged;
  merged.reserve(clusters.size());
  int next_id = 1;
  for (const auto& [cluster, indices] : clusters) {
    Tracklet out;
    out.id = next_id++;
    for (const std::size_t i : indices) {
      out.entries.insert(out.entries.end(), tracklets[i].entries.begin(),
                         tracklets[i].entries.end());
    }
    std::sort(out.entries.begin(), out.entries.end(),
              [](const TrackletEntry& a, const TrackletEntry& b) { return a.frame < b.frame; });
    for (std::size_t k = 1; k < out.entries.size(); ++k) {
      if (out.entries[k].frame == out.entries[k - 1].frame) {
        throw std::logic_error("cluster contains temporally overlapping tracklets");
      }
    }
    merged.push_back(std::move(out));
  }
  return merged;
}

}  // namespace cbtrack
