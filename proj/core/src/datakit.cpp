#include "furrow/datakit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <type_traits>

#include "trace.hpp"

namespace furrow {

EdgeMask rasterize_label(const FurrowEdgeModel& model, int width, int height) {
  EdgeMask mask(width, height);
  std::vector<detail::RowPoint> points;
  points.reserve(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) points.push_back({y, model(y)});
  if (detail::draw_row_trace(mask, points) == 0) {
    throw Error(ErrorCode::kOutOfFrame, "edge curve lies entirely outside the frame");
  }
  return mask;
}

bool quality_filter(const FurrowEdgeModel& model, double min_inlier_ratio,
                    std::size_t min_candidates) {
  return model.inlier_ratio >= min_inlier_ratio && model.candidate_count >= min_candidates;
}

bool quality_filter(const FurrowEdgeModel& model, const QualityGate& gate) {
  return quality_filter(model, gate.min_inlier_ratio, gate.min_candidates);
}

void AugmentSpec::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(max_rotation >= 0.0 && max_rotation <= std::numbers::pi / 2)) {
    fail("max_rotation must be in [0, pi/2]");
  }
  if (!(max_shift >= 0.0)) fail("max_shift must be >= 0");
  if (crop_size <= 0) fail("crop_size must be > 0");
  if (!(negative_fraction >= 0.0 && negative_fraction <= 1.0)) {
    fail("negative_fraction must be in [0, 1]");
  }
  if (copies_per_frame < 0) fail("copies_per_frame must be >= 0");
}

Roi augment_crop_window(const EdgeMask& mask, int crop_size) {
  const int w = mask.width();
  const int h = mask.height();
  if (crop_size > w || crop_size > h) {
    throw Error(ErrorCode::kInvalidArgument, "crop_size exceeds the source frame");
  }
  const int y0 = h - crop_size;
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = y0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y)) {
        sum += x;
        ++count;
      }
    }
  }
  const double center = count ? sum / static_cast<double>(count) : 0.5 * (w - 1);
  const long x0 = std::clamp(std::lround(center - 0.5 * (crop_size - 1)), 0L,
                             static_cast<long>(w - crop_size));
  return {static_cast<int>(x0), static_cast<int>(x0) + crop_size, y0, h};
}

namespace {

bool any_edge(const EdgeMask& mask) {
  return std::any_of(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; });
}

// Integer shift that moves every mask pixel inside the crop rows out of the
// crop columns, or nullopt when neither direction can within the frame width.
std::optional<double> clearing_shift(const EdgeMask& rotated, const Roi& window, double margin,
                                     bool prefer_right) {
  int min_x = rotated.width();
  int max_x = -1;
  for (int y = window.y_min; y < window.y_max; ++y) {
    for (int x = 0; x < rotated.width(); ++x) {
      if (!rotated.at(x, y)) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
    }
  }
  if (max_x < 0) return 0.0;

  const int limit = rotated.width() - 1;
  const int right = window.x_max - min_x;  // min_x + s >= x_max
  const int left = window.x_min - 1 - max_x;  // max_x + s < x_min
  const int extra = static_cast<int>(std::floor(margin));
  const bool right_ok = right + extra <= limit;
  const bool left_ok = -(left - extra) <= limit;
  if (!right_ok && !left_ok) {
    if (right <= limit) return static_cast<double>(right);
    if (-left <= limit) return static_cast<double>(left);
    return std::nullopt;
  }
  bool go_right = right_ok;
  if (right_ok && left_ok) {
    go_right = right < -left || (right == -left && prefer_right);
  }
  return go_right ? static_cast<double>(right + extra) : static_cast<double>(left - extra);
}

}  // namespace

template <typename Image>
AugmentResult<Image> augment(const Image& img, const EdgeMask& mask, const AugmentSpec& spec) {
  spec.validate();
  if (img.width() != mask.width() || img.height() != mask.height()) {
    throw Error(ErrorCode::kInvalidArgument, "image and mask sizes differ");
  }
  const Roi window = augment_crop_window(mask, spec.crop_size);
  constexpr Interpolation kInterp =
      std::is_same_v<Image, DepthMap> ? Interpolation::kNearest : Interpolation::kBilinear;

  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AugmentResult<Image> result;
  for (int copy = 0; copy < spec.copies_per_frame; ++copy) {
    const double angle = spec.max_rotation * (2.0 * unit(rng) - 1.0);
    double shift = spec.max_shift * (2.0 * unit(rng) - 1.0);
    const bool negative = unit(rng) < spec.negative_fraction;
    const double margin = spec.max_shift * unit(rng);
    const bool prefer_right = unit(rng) < 0.5;

    if (negative) {
      const EdgeMask rotated = warp_affine(mask, angle, 0.0, std::uint8_t{0});
      const auto cleared = clearing_shift(rotated, window, margin, prefer_right);
      if (!cleared) {
        ++result.skipped_negatives;
        continue;
      }
      shift = *cleared;
    }

    AugmentedSample<Image> sample;
    sample.angle = angle;
    sample.shift = shift;
    sample.crop = window;
    sample.mask = crop(warp_affine(mask, angle, shift, std::uint8_t{0}), window);
    sample.has_edge = any_edge(sample.mask);
    if (negative && sample.has_edge) {
      ++result.skipped_negatives;
      continue;
    }
    sample.image = crop(warp_affine(img, angle, shift, typename Image::value_type{}, kInterp), window);
    result.samples.push_back(std::move(sample));
  }
  return result;
}

template AugmentResult<DepthMap> augment(const DepthMap&, const EdgeMask&, const AugmentSpec&);
template AugmentResult<GrayImage> augment(const GrayImage&, const EdgeMask&, const AugmentSpec&);
template AugmentResult<RgbImage> augment(const RgbImage&, const EdgeMask&, const AugmentSpec&);

}  // namespace furrow
