#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "furrow/image.hpp"

namespace furrow {

/// Furrow detector parameters. Defaults reproduce the field configuration:
/// start at 0.92 m, bands 25 px tall every 5 px with no band limit, 30x30
/// step template, score threshold 0, RANSAC threshold 30 px, ROI columns
/// [250, 640) over the full 480-row frame, 2nd degree fit.
struct DetectorConfig {
  double starting_depth = 0.92;
  int band_width = 25;
  int band_shift = 5;
  std::optional<int> max_bands;  // nullopt = unbounded
  int template_size = 30;
  double score_threshold = 0.0;
  double ransac_threshold = 30.0;
  int ransac_iterations = 500;
  Roi roi{250, 640, 0, 480};
  int fit_degree = 2;
  std::uint64_t rng_seed = 0;
  double max_invalid_fraction = 0.3;
  bool subpixel = true;

  void validate() const;
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// Zero-mean, unit-norm square patch.
class Template {
 public:
  Template(int size, std::vector<double> values);

  int size() const noexcept { return size_; }
  double at(int x, int y) const noexcept { return values_[static_cast<std::size_t>(y) * size_ + x]; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  int size_;
  std::vector<double> values_;
};

/// Vertical step: left half low, right half high, then normalized.
Template make_step_template(int size);

/// Score reported for windows that can never match.
inline constexpr double kNoMatchScore = -2.0;

/// Zero-mean NCC between a depth window and the template. Invalid (0)
/// pixels are excluded and both signals re-centred on the valid set; windows
/// with too many invalid pixels or (near) zero variance score kNoMatchScore.
double ncc_score(const DepthMap& patch, const Template& tmpl,
                 double max_invalid_fraction = 0.3);

/// Same as ncc_score on the window whose top-left corner is (left, top);
/// pixels outside the map count as invalid.
double ncc_at(const DepthMap& depth, int left, int top, const Template& tmpl,
              double max_invalid_fraction = 0.3);

struct CandidatePoint {
  double x = 0.0;  // column of the step boundary
  double y = 0.0;  // band center row
  double score = 0.0;
  int band_index = 0;

  friend bool operator==(const CandidatePoint&, const CandidatePoint&) = default;
};

/// One horizontal strip scanned by the detector.
struct Band {
  int index = 0;
  int center_row = 0;
  int top = 0;     // center_row - band_width / 2
  int bottom = 0;  // exclusive
};

/// x = a y^2 + b y + c in image coordinates.
struct FurrowEdgeModel {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::vector<std::size_t> inlier_indices;
  double inlier_ratio = 0.0;
  std::size_t candidate_count = 0;

  double operator()(double y) const noexcept { return (a * y + b) * y + c; }
  friend bool operator==(const FurrowEdgeModel&, const FurrowEdgeModel&) = default;
};

/// Bottom-most ROI row whose median valid depth over ROI columns reaches the
/// starting depth. Throws kNoStartRow.
int start_row(const DepthMap& depth, const DetectorConfig& cfg);

/// Bands stepping upward from `start` by band_shift until the template would
/// leave the ROI top or max_bands is reached.
std::vector<Band> band_layout(int start, const DetectorConfig& cfg);

/// Best template match per band; emitted iff score >= score_threshold.
/// Ordered by band index.
std::vector<CandidatePoint> scan_bands(const DepthMap& depth, const DetectorConfig& cfg,
                                       const Template& tmpl);

/// RANSAC over 3-point exact parabolas followed by a least-squares refit on
/// the winning consensus set. Deterministic for a given cfg.rng_seed.
/// Throws kInsufficientPoints or kAllDegenerate.
FurrowEdgeModel fit_parabola_ransac(const std::vector<CandidatePoint>& points,
                                    const DetectorConfig& cfg);

/// Least-squares parabola through the given points (at least 3 distinct y).
FurrowEdgeModel fit_parabola_least_squares(const std::vector<CandidatePoint>& points);

struct Detection {
  int start_row = 0;
  std::vector<CandidatePoint> candidates;
  FurrowEdgeModel model;
};

/// Whole pipeline, keeping intermediate results for debugging.
Detection detect_furrow_detailed(const DepthMap& depth, const DetectorConfig& cfg);

FurrowEdgeModel detect_furrow(const DepthMap& depth, const DetectorConfig& cfg);

}  // namespace furrow
