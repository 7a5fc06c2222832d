#pragma once

#include <cstdint>
#include <vector>

#include "furrow/camera.hpp"
#include "furrow/image.hpp"

// Deliberately naive reference implementations used to cross-check the
// optimized library code.
namespace furrow::oracle {

/// Full 2-D Gaussian correlation with a freshly built 2-D kernel and
/// reflect-101 borders.
GrayImage dense_gaussian_blur(const GrayImage& img, int size, double sigma);

/// Otsu over all 256 thresholds using textbook class means and weights in
/// long double. Class 0 holds bins <= t; the smallest maximizer wins.
int exhaustive_otsu(const GrayImage& img);

/// Pearson correlation of two equally sized sample vectors; NaN when either
/// side is constant.
double direct_ncc(const std::vector<double>& a, const std::vector<double>& b);

/// Hysteresis via union-find over 8-connected candidate pixels: a component
/// survives when it holds at least one pixel >= high.
EdgeMask union_find_hysteresis(const GrayImage& suppressed, double low, double high);

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t predicted = 0;
  std::size_t truth = 0;
};

/// Greedy matching over every (pred, gt) pixel pair, ordered like the
/// library: squared distance, then min index, max index, pred index.
MatchCounts brute_force_match(const EdgeMask& pred, const EdgeMask& gt, double tolerance);

double f1(const MatchCounts& c);

struct SweepResult {
  double ods = 0.0;
  double ods_threshold = 0.0;
  double ois = 0.0;
};

/// Recomputes every threshold of the 0.01..0.99 grid from scratch.
SweepResult exhaustive_ods_ois(const std::vector<SoftMask>& preds, const std::vector<EdgeMask>& gts,
                               double tolerance);

/// Ground point of pixel (u, v) from explicit rotation matrices.
bool ground_from_pixel(const CameraModel& cam, double u, double v, double& x, double& z);

}  // namespace furrow::oracle
