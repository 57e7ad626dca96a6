#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include <cbtrack/box.hpp>
#include <cbtrack/tracklet.hpp>

namespace cbtrack {

struct IdBox {
  int id = 0;
  Box box;

  friend bool operator==(const IdBox&, const IdBox&) = default;
};

/// Ground truth or predictions keyed by frame; at most one box per
/// identity per frame (enforced by evaluate).
using FrameAnnotations = std::map<int, std::vector<IdBox>>;

FrameAnnotations annotations_from_tracklets(const std::vector<Tracklet>& tracklets);

/// All values in [0, 1] except mota, which can go negative. Multiply by
/// 100 for the conventional display scale.
struct MetricReport {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  double mota = 0.0;
  double idf1 = 0.0;
};

/// HOTA alpha sweep: 0.05 to 0.95 in steps of 0.10.
inline constexpr std::array<double, 10> kHotaAlphas = {
    0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};

/// Raw per-sequence accumulators. Pooling sums these across sequences
/// before any ratio is taken.
struct MetricCounts {
  // HOTA, per alpha: true/false positives/negatives and the summed
  // association Jaccard over TPs.
  std::array<double, kHotaAlphas.size()> hota_tp{};
  std::array<double, kHotaAlphas.size()> hota_fn{};
  std::array<double, kHotaAlphas.size()> hota_fp{};
  std::array<double, kHotaAlphas.size()> ass_sum{};
  // CLEAR
  double clear_fn = 0.0;
  double clear_fp = 0.0;
  double id_switches = 0.0;
  // Identity
  double idtp = 0.0;
  double gt_total = 0.0;
  double pred_total = 0.0;

  MetricCounts& operator+=(const MetricCounts& other);
};

MetricCounts evaluate_counts(const FrameAnnotations& gt, const FrameAnnotations& pred,
                             double iou_gate = 0.5);
MetricReport report_from_counts(const MetricCounts& counts);

/// Single-sequence evaluation: per-frame IoU-gated optimal matching for
/// CLEAR, global ID assignment for IDF1, and the double-Jaccard HOTA with
/// its DetA/AssA sub-scores.
MetricReport evaluate(const FrameAnnotations& gt, const FrameAnnotations& pred,
                      double iou_gate = 0.5);

/// Multi-sequence evaluation pooling counts, not scores. `jobs` threads
/// evaluate sequences concurrently; the pooled result does not depend on
/// the schedule.
MetricReport evaluate_sequences(
    const std::vector<std::pair<FrameAnnotations, FrameAnnotations>>& sequences,
    double iou_gate = 0.5, int jobs = 1);

}  // namespace cbtrack
