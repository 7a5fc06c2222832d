#include "furrow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>

namespace furrow {
namespace {

struct Pair {
  std::uint32_t pred = 0;
  std::uint32_t gt = 0;
  int dist2 = 0;
};

// All (candidate prediction pixel, GT pixel) pairs within `tolerance`, in the
// greedy matching order: distance first, then a key symmetric in the roles.
template <typename IsCandidate>
std::vector<Pair> tolerance_pairs(const EdgeMask& gt, double tolerance, IsCandidate&& is_candidate) {
  const int w = gt.width();
  const int h = gt.height();
  const int r = static_cast<int>(std::floor(tolerance));
  const double tol2 = tolerance * tolerance;
  std::vector<Pair> pairs;
  for (int gy = 0; gy < h; ++gy) {
    for (int gx = 0; gx < w; ++gx) {
      if (!gt.at(gx, gy)) continue;
      const auto g = static_cast<std::uint32_t>(gy * w + gx);
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int d2 = dx * dx + dy * dy;
          if (d2 > tol2 + 1e-9) continue;
          const int px = gx + dx;
          const int py = gy + dy;
          if (px < 0 || py < 0 || px >= w || py >= h) continue;
          const auto p = static_cast<std::uint32_t>(py * w + px);
          if (is_candidate(p)) pairs.push_back({p, g, d2});
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::make_tuple(a.dist2, std::min(a.pred, a.gt), std::max(a.pred, a.gt), a.pred) <
           std::make_tuple(b.dist2, std::min(b.pred, b.gt), std::max(b.pred, b.gt), b.pred);
  });
  return pairs;
}

template <typename IsPred>
std::size_t greedy_matches(const std::vector<Pair>& pairs, std::size_t pixels, IsPred&& is_pred) {
  std::vector<std::uint8_t> pred_used(pixels, 0);
  std::vector<std::uint8_t> gt_used(pixels, 0);
  std::size_t matched = 0;
  for (const Pair& pr : pairs) {
    if (pred_used[pr.pred] || gt_used[pr.gt] || !is_pred(pr.pred)) continue;
    pred_used[pr.pred] = 1;
    gt_used[pr.gt] = 1;
    ++matched;
  }
  return matched;
}

EdgeScore make_score(std::size_t tp, std::size_t predicted, std::size_t truth, double tolerance,
                     double threshold) {
  EdgeScore s;
  s.true_positives = tp;
  s.predicted = predicted;
  s.ground_truth = truth;
  s.tolerance = tolerance;
  s.threshold = threshold;
  s.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  s.recall = truth ? static_cast<double>(tp) / static_cast<double>(truth) : 0.0;
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

std::size_t count_edges(const EdgeMask& m) {
  return static_cast<std::size_t>(std::count_if(m.data().begin(), m.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

void check_dims(int w1, int h1, int w2, int h2) {
  if (w1 != w2 || h1 != h2) throw Error(ErrorCode::kInvalidArgument, "prediction and GT sizes differ");
}

}  // namespace

double f1_score(double precision, double recall) noexcept {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

EdgeScore score_edges(const EdgeMask& pred, const EdgeMask& gt, double tolerance) {
  check_dims(pred.width(), pred.height(), gt.width(), gt.height());
  auto is_pred = [&](std::uint32_t i) { return pred.data()[i] != 0; };
  const auto pairs = tolerance_pairs(gt, tolerance, is_pred);
  const std::size_t tp = greedy_matches(pairs, pred.pixel_count(), is_pred);
  return make_score(tp, count_edges(pred), count_edges(gt), tolerance, 0.5);
}

EdgeMask binarize(const SoftMask& soft, double threshold) {
  EdgeMask out(soft.width(), soft.height());
  auto src = soft.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<double>(src[i]) >= threshold;
  return out;
}

EdgeScore score_edges(const SoftMask& pred, const EdgeMask& gt, double tolerance, double threshold) {
  EdgeScore s = score_edges(binarize(pred, threshold), gt, tolerance);
  s.threshold = threshold;
  return s;
}

std::vector<double> ods_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  return grid;
}

OdsOisResult ods_ois(const std::vector<SoftMask>& preds, const std::vector<EdgeMask>& gts,
                     double tolerance) {
  if (preds.empty()) throw Error(ErrorCode::kEmptyDataset, "no images to evaluate");
  if (preds.size() != gts.size()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction and GT lists differ in length");
  }
  const auto grid = ods_threshold_grid();
  std::vector<std::size_t> tp_sum(grid.size(), 0);
  std::vector<std::size_t> pred_sum(grid.size(), 0);
  std::size_t gt_sum = 0;

  OdsOisResult result;
  double ois_total = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const SoftMask& pred = preds[n];
    const EdgeMask& gt = gts[n];
    check_dims(pred.width(), pred.height(), gt.width(), gt.height());
    const auto probs = pred.data();
    const auto pairs = tolerance_pairs(gt, tolerance, [](std::uint32_t) { return true; });
    const std::size_t truth = count_edges(gt);
    gt_sum += truth;

    double best_f1 = -1.0;
    double best_t = grid.front();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double t = grid[k];
      auto is_pred = [&](std::uint32_t i) { return static_cast<double>(probs[i]) >= t; };
      const std::size_t tp = greedy_matches(pairs, pred.pixel_count(), is_pred);
      const auto predicted = static_cast<std::size_t>(std::count_if(
          probs.begin(), probs.end(), [t](float p) { return static_cast<double>(p) >= t; }));
      tp_sum[k] += tp;
      pred_sum[k] += predicted;
      const double f1 = make_score(tp, predicted, truth, tolerance, t).f1;
      if (f1 > best_f1) {
        best_f1 = f1;
        best_t = t;
      }
    }
    ois_total += best_f1;
    result.ois_thresholds.push_back(best_t);
  }
  result.ois_f1 = ois_total / static_cast<double>(preds.size());

  result.ods_f1 = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double f1 = make_score(tp_sum[k], pred_sum[k], gt_sum, tolerance, grid[k]).f1;
    if (f1 > result.ods_f1) {
      result.ods_f1 = f1;
      result.ods_threshold = grid[k];
    }
  }
  return result;
}

}  // namespace furrow
