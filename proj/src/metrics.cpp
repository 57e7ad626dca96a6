#include <cbtrack/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>

#include <Eigen/Core>

#include <cbtrack/assignment.hpp>
#include <cbtrack/parallel.hpp>

namespace cbtrack {

namespace {

constexpr double kEps = 1e-12;
constexpr double kContinuityBonus = 1000.0;

struct FrameSlice {
  std::vector<int> gt_ids;    // dense indices
  std::vector<int> pred_ids;  // dense indices
  Eigen::MatrixXd sim;        // gt x pred IoU
};

struct SequenceView {
  std::vector<FrameSlice> frames;
  int num_gt_ids = 0;
  int num_pred_ids = 0;
  double gt_total = 0.0;
  double pred_total = 0.0;
};

void index_ids(const FrameAnnotations& ann, std::map<int, int>& dense) {
  for (const auto& [frame, list] : ann) {
    std::set<int> seen;
    for (const auto& ib : list) {
      require_valid(ib.box);
      if (!seen.insert(ib.id).second) {
        throw std::invalid_argument("duplicate identity " + std::to_string(ib.id) +
                                    " in frame " + std::to_string(frame));
      }
      dense.emplace(ib.id, 0);
    }
  }
  int next = 0;
  for (auto& [id, idx] : dense) idx = next++;
}

SequenceView build_view(const FrameAnnotations& gt, const FrameAnnotations& pred) {
  std::map<int, int> gt_dense, pred_dense;
  index_ids(gt, gt_dense);
  index_ids(pred, pred_dense);

  std::set<int> frames;
  for (const auto& [f, v] : gt) frames.insert(f);
  for (const auto& [f, v] : pred) frames.insert(f);

  SequenceView view;
  view.num_gt_ids = static_cast<int>(gt_dense.size());
  view.num_pred_ids = static_cast<int>(pred_dense.size());
  view.frames.reserve(frames.size());
  static const std::vector<IdBox> kEmpty;
  for (const int f : frames) {
    const auto git = gt.find(f);
    const auto pit = pred.find(f);
    const auto& glist = git == gt.end() ? kEmpty : git->second;
    const auto& plist = pit == pred.end() ? kEmpty : pit->second;
    FrameSlice slice;
    slice.gt_ids.reserve(glist.size());
    slice.pred_ids.reserve(plist.size());
    for (const auto& ib : glist) slice.gt_ids.push_back(gt_dense.at(ib.id));
    for (const auto& ib : plist) slice.pred_ids.push_back(pred_dense.at(ib.id));
    slice.sim.resize(static_cast<Eigen::Index>(glist.size()),
                     static_cast<Eigen::Index>(plist.size()));
    for (std::size_t i = 0; i < glist.size(); ++i) {
      for (std::size_t j = 0; j < plist.size(); ++j) {
        slice.sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            iou(glist[i].box, plist[j].box);
      }
    }
    view.gt_total += static_cast<double>(glist.size());
    view.pred_total += static_cast<double>(plist.size());
    view.frames.push_back(std::move(slice));
  }
  return view;
}

// (row, col) pairs of a maximum-total-score assignment.
std::vector<std::pair<int, int>> max_score_pairs(const Eigen::MatrixXd& scores) {
  std::vector<std::pair<int, int>> out;
  if (scores.rows() == 0 || scores.cols() == 0) return out;
  const std::vector<int> row_to_col = assign_min_cost(-scores);
  for (int i = 0; i < static_cast<int>(scores.rows()); ++i) {
    const int j = row_to_col[static_cast<std::size_t>(i)];
    if (j >= 0) out.emplace_back(i, j);
  }
  return out;
}

void accumulate_clear(const SequenceView& view, double gate, MetricCounts& counts) {
  std::vector<int> prev_match(static_cast<std::size_t>(view.num_gt_ids), -1);
  for (const auto& slice : view.frames) {
    const int gn = static_cast<int>(slice.gt_ids.size());
    const int pn = static_cast<int>(slice.pred_ids.size());
    if (gn == 0 || pn == 0) {
      counts.clear_fn += gn;
      counts.clear_fp += pn;
      continue;
    }
    Eigen::MatrixXd score(gn, pn);
    for (int i = 0; i < gn; ++i) {
      const int g = slice.gt_ids[static_cast<std::size_t>(i)];
      for (int j = 0; j < pn; ++j) {
        const double sim = slice.sim(i, j);
        if (sim < gate - kEps) {
          score(i, j) = 0.0;
        } else {
          const bool continues = prev_match[static_cast<std::size_t>(g)] ==
                                 slice.pred_ids[static_cast<std::size_t>(j)];
          score(i, j) = sim + (continues ? kContinuityBonus : 0.0);
        }
      }
    }
    int matched = 0;
    for (const auto& [i, j] : max_score_pairs(score)) {
      if (score(i, j) <= kEps) continue;
      ++matched;
      const int g = slice.gt_ids[static_cast<std::size_t>(i)];
      const int t = slice.pred_ids[static_cast<std::size_t>(j)];
      if (prev_match[static_cast<std::size_t>(g)] != -1 &&
          prev_match[static_cast<std::size_t>(g)] != t) {
        counts.id_switches += 1.0;
      }
      prev_match[static_cast<std::size_t>(g)] = t;
    }
    counts.clear_fn += gn - matched;
    counts.clear_fp += pn - matched;
  }
}

void accumulate_identity(const SequenceView& view, double gate, MetricCounts& counts) {
  if (view.num_gt_ids == 0 || view.num_pred_ids == 0) return;
  Eigen::MatrixXd potential =
      Eigen::MatrixXd::Zero(view.num_gt_ids, view.num_pred_ids);
  for (const auto& slice : view.frames) {
    for (std::size_t i = 0; i < slice.gt_ids.size(); ++i) {
      for (std::size_t j = 0; j < slice.pred_ids.size(); ++j) {
        if (slice.sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >=
            gate - kEps) {
          potential(slice.gt_ids[i], slice.pred_ids[j]) += 1.0;
        }
      }
    }
  }
  for (const auto& [g, t] : max_score_pairs(potential)) {
    counts.idtp += potential(g, t);
  }
}

void accumulate_hota(const SequenceView& view, MetricCounts& counts) {
  const int G = view.num_gt_ids;
  const int P = view.num_pred_ids;
  if (G == 0 || P == 0) {
    for (std::size_t a = 0; a < kHotaAlphas.size(); ++a) {
      counts.hota_fn[a] += view.gt_total;
      counts.hota_fp[a] += view.pred_total;
    }
    return;
  }

  // Global alignment: Jaccard-weighted co-occurrence of each (gt, pred)
  // identity pair across the sequence.
  Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(G, P);
  Eigen::VectorXd gt_count = Eigen::VectorXd::Zero(G);
  Eigen::VectorXd pred_count = Eigen::VectorXd::Zero(P);
  for (const auto& slice : view.frames) {
    const Eigen::VectorXd row_sum = slice.sim.rowwise().sum();
    const Eigen::VectorXd col_sum = slice.sim.colwise().sum();
    for (std::size_t i = 0; i < slice.gt_ids.size(); ++i) {
      gt_count(slice.gt_ids[i]) += 1.0;
      for (std::size_t j = 0; j < slice.pred_ids.size(); ++j) {
        const double sim = slice.sim(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j));
        const double denom = row_sum(static_cast<Eigen::Index>(i)) +
                             col_sum(static_cast<Eigen::Index>(j)) - sim;
        if (denom > kEps) {
          potential(slice.gt_ids[i], slice.pred_ids[j]) += sim / denom;
        }
      }
    }
    for (std::size_t j = 0; j < slice.pred_ids.size(); ++j) {
      pred_count(slice.pred_ids[j]) += 1.0;
    }
  }
  Eigen::MatrixXd global_score(G, P);
  for (int g = 0; g < G; ++g) {
    for (int t = 0; t < P; ++t) {
      global_score(g, t) =
          potential(g, t) / (gt_count(g) + pred_count(t) - potential(g, t));
    }
  }

  // Per-frame matching on globally informed scores; each alpha keeps the
  // matched pairs whose raw IoU clears it.
  std::vector<Eigen::MatrixXd> match_counts(
      kHotaAlphas.size(), Eigen::MatrixXd::Zero(G, P));
  for (const auto& slice : view.frames) {
    const int gn = static_cast<int>(slice.gt_ids.size());
    const int pn = static_cast<int>(slice.pred_ids.size());
    std::array<double, kHotaAlphas.size()> tp_frame{};
    if (gn > 0 && pn > 0) {
      Eigen::MatrixXd score(gn, pn);
      for (int i = 0; i < gn; ++i) {
        for (int j = 0; j < pn; ++j) {
          score(i, j) = global_score(slice.gt_ids[static_cast<std::size_t>(i)],
                                     slice.pred_ids[static_cast<std::size_t>(j)]) *
                        slice.sim(i, j);
        }
      }
      for (const auto& [i, j] : max_score_pairs(score)) {
        const double sim = slice.sim(i, j);
        for (std::size_t a = 0; a < kHotaAlphas.size(); ++a) {
          if (sim >= kHotaAlphas[a] - kEps) {
            tp_frame[a] += 1.0;
            match_counts[a](slice.gt_ids[static_cast<std::size_t>(i)],
                            slice.pred_ids[static_cast<std::size_t>(j)]) += 1.0;
          }
        }
      }
    }
    for (std::size_t a = 0; a < kHotaAlphas.size(); ++a) {
      counts.hota_tp[a] += tp_frame[a];
      counts.hota_fn[a] += gn - tp_frame[a];
      counts.hota_fp[a] += pn - tp_frame[a];
    }
  }

  for (std::size_t a = 0; a < kHotaAlphas.size(); ++a) {
    double ass_sum = 0.0;
    for (int g = 0; g < G; ++g) {
      for (int t = 0; t < P; ++t) {
        const double c = match_counts[a](g, t);
        if (c > 0.0) {
          ass_sum += c * (c / (gt_count(g) + pred_count(t) - c));
        }
      }
    }
    counts.ass_sum[a] += ass_sum;
  }
}

}  // namespace

FrameAnnotations annotations_from_tracklets(const std::vector<Tracklet>& tracklets) {
  FrameAnnotations out;
  for (const auto& t : tracklets) {
    for (const auto& e : t.entries) {
      out[e.frame].push_back(IdBox{t.id, e.box});
    }
  }
  return out;
}

MetricCounts& MetricCounts::operator+=(const MetricCounts& other) {
  for (std::size_t a = 0; a < kHotaAlphas.size(); ++a) {
    hota_tp[a] += other.hota_tp[a];
    hota_fn[a] += other.hota_fn[a];
    hota_fp[a] += other.hota_fp[a];
    ass_sum[a] += other.ass_sum[a];
  }
  clear_fn += other.clear_fn;
  clear_fp += other.clear_fp;
  id_switches += other.id_switches;
  idtp += other.idtp;
  gt_total += other.gt_total;
  pred_total += other.pred_total;
  return *this;
}

MetricCounts evaluate_counts(const FrameAnnotations& gt, const FrameAnnotations& pred,
                             double iou_gate) {
  if (!(iou_gate > 0.0 && iou_gate < 1.0)) {
    throw std::invalid_argument("iou gate must lie in (0, 1)");
  }
  const SequenceView view = build_view(gt, pred);
  MetricCounts counts;
  counts.gt_total = view.gt_total;
  counts.pred_total = view.pred_total;
  accumulate_clear(view, iou_gate, counts);
  accumulate_identity(view, iou_gate, counts);
  accumulate_hota(view, counts);
  return counts;
}

MetricReport report_from_counts(const MetricCounts& c) {
  MetricReport report;
  if (c.gt_total == 0.0 && c.pred_total == 0.0) {
    return MetricReport{1.0, 1.0, 1.0, 1.0, 1.0};
  }
  double hota = 0.0, deta = 0.0, assa = 0.0;
  for (std::size_t a = 0; a < kHotaAlphas.size(); ++a) {
    const double det_denom =
        std::max(1.0, c.hota_tp[a] + c.hota_fn[a] + c.hota_fp[a]);
    const double det = c.hota_tp[a] / det_denom;
    const double ass = c.ass_sum[a] / std::max(1.0, c.hota_tp[a]);
    deta += det;
    assa += ass;
    hota += std::sqrt(det * ass);
  }
  const double n_alpha = static_cast<double>(kHotaAlphas.size());
  report.hota = hota / n_alpha;
  report.deta = deta / n_alpha;
  report.assa = assa / n_alpha;
  report.mota =
      1.0 - (c.clear_fn + c.clear_fp + c.id_switches) / std::max(1.0, c.gt_total);
  report.idf1 = 2.0 * c.idtp / std::max(1.0, c.gt_total + c.pred_total);
  return report;
}

MetricReport evaluate(const FrameAnnotations& gt, const FrameAnnotations& pred,
                      double iou_gate) {
  return report_from_counts(evaluate_counts(gt, pred, iou_gate));
}

MetricReport evaluate_sequences(
    const std::vector<std::pair<FrameAnnotations, FrameAnnotations>>& sequences,
    double iou_gate, int jobs) {
  if (sequences.empty()) {
    throw std::invalid_argument("evaluate_sequences requires at least one sequence");
  }
  std::vector<MetricCounts> per_seq(sequences.size());
  std::exception_ptr error;
  std::mutex error_mutex;
  detail::parallel_for(sequences.size(), jobs, [&](std::size_t i) {
    try {
      per_seq[i] = evaluate_counts(sequences[i].first, sequences[i].second, iou_gate);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);
  MetricCounts pooled;
  for (const auto& c : per_seq) pooled += c;
  return report_from_counts(pooled);
}

}  // namespace cbtrack
