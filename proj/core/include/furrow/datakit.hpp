#pragma once

#include <cstdint>
#include <vector>

#include "furrow/image.hpp"
#include "furrow/matcher.hpp"

namespace furrow {

/// 1-px, 8-connected trace of x = f(y) over rows where the curve is inside
/// the frame. Throws kOutOfFrame when no row qualifies.
EdgeMask rasterize_label(const FurrowEdgeModel& model, int width, int height);

struct QualityGate {
  double min_inlier_ratio = 0.6;
  std::size_t min_candidates = 10;

  friend bool operator==(const QualityGate&, const QualityGate&) = default;
};

bool quality_filter(const FurrowEdgeModel& model, const QualityGate& gate);
bool quality_filter(const FurrowEdgeModel& model, double min_inlier_ratio,
                    std::size_t min_candidates);

struct AugmentSpec {
  double max_rotation = 0.08726646259971647;  // 5 degrees
  double max_shift = 60.0;                    // pixels
  int crop_size = 400;
  double negative_fraction = 0.1;
  int copies_per_frame = 1;
  std::uint64_t rng_seed = 0;

  void validate() const;
  friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

template <typename Image>
struct AugmentedSample {
  Image image;
  EdgeMask mask;
  bool has_edge = false;
  double angle = 0.0;
  double shift = 0.0;
  Roi crop;  // crop window in warped-frame coordinates
};

template <typename Image>
struct AugmentResult {
  std::vector<AugmentedSample<Image>> samples;
  int skipped_negatives = 0;  // copies where no shift could clear the crop
};

/// Rotates and shifts image and mask together, then crops a crop_size square
/// anchored at the bottom rows and centered on the source edge. Copies drawn
/// as negatives get a shift large enough to push the edge out of the crop.
template <typename Image>
AugmentResult<Image> augment(const Image& img, const EdgeMask& mask, const AugmentSpec& spec);

/// Crop window used by augment for a given source mask.
Roi augment_crop_window(const EdgeMask& mask, int crop_size);

}  // namespace furrow
