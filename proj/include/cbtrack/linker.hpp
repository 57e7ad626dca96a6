#pragma once

#include <vector>

#include <Eigen/Core>

#include <cbtrack/embedding.hpp>
#include <cbtrack/tracklet.hpp>

namespace cbtrack {

/// Symmetric tracklet-pair distances: entries in [0, 2], +inf exactly for
/// temporally overlapping pairs, zero diagonal.
using DistanceMatrix = Eigen::MatrixXd;

/// Appearance distance between two tracklets: +inf when their temporal
/// ranges intersect, otherwise the mean cosine distance over all
/// cross-pairs of their per-detection features. Computed as
/// 1 - dot(mean of normalized features, mean of normalized features),
/// which is algebraically equal to the double sum.
double tracklet_distance(const Tracklet& a, const Tracklet& b, const EmbeddingTable& emb);

/// All-pairs tracklet_distance; rows may be filled in parallel.
DistanceMatrix build_distance_matrix(const std::vector<Tracklet>& tracklets,
                                     const EmbeddingTable& emb, int jobs = 1);

/// Agglomerative average-linkage clustering: repeatedly merges the
/// closest pair of clusters while the linkage distance stays below `cut`.
/// +inf entries propagate through the averaged linkage, so temporally
/// overlapping tracklets can never share a cluster. Returns a cluster id
/// per tracklet, ids numbered by each cluster's smallest member. Equal
/// merge distances resolve to the pair with the smallest member index.
std::vector<int> cluster_average_linkage(const DistanceMatrix& distances, double cut);

/// Concatenates each cluster into one tracklet (entries in frame order,
/// fresh ids from 1). Clusters with temporally overlapping members are a
/// contract breach and raise logic_error.
std::vector<Tracklet> merge_tracklets(const std::vector<Tracklet>& tracklets,
                                      const std::vector<int>& assignment);

}  // namespace cbtrack
