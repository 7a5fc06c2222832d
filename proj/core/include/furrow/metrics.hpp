#pragma once

#include <vector>

#include "furrow/image.hpp"

namespace furrow {

struct EdgeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double tolerance = 0.0;
  double threshold = 0.5;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t ground_truth = 0;
};

/// 2PR / (P + R), 0 when both are 0.
double f1_score(double precision, double recall) noexcept;

/// Matched-pixel counts for one image. A prediction is a true positive when
/// it is paired with a distinct GT pixel within `tolerance` (Euclidean);
/// pairs are taken greedily in increasing distance order.
EdgeScore score_edges(const EdgeMask& pred, const EdgeMask& gt, double tolerance);

/// Binarizes at p >= threshold, then scores.
EdgeScore score_edges(const SoftMask& pred, const EdgeMask& gt, double tolerance,
                      double threshold);

EdgeMask binarize(const SoftMask& soft, double threshold);

struct OdsOisResult {
  double ods_f1 = 0.0;
  double ods_threshold = 0.0;
  double ois_f1 = 0.0;
  std::vector<double> ois_thresholds;  // best threshold per image
};

/// Threshold grid 0.01, 0.02, ..., 0.99.
std::vector<double> ods_threshold_grid();

/// ODS: best dataset-aggregated F1 over the grid. OIS: mean of per-image
/// best F1. Throws kEmptyDataset or kInvalidArgument on misaligned input.
OdsOisResult ods_ois(const std::vector<SoftMask>& preds, const std::vector<EdgeMask>& gts,
                     double tolerance);

}  // namespace furrow
