#pragma once

#include <vector>

#include "furrow/image.hpp"

namespace furrow {

struct CannyParams {
  double high_threshold = 0.0;
  double low_threshold = 0.0;
  int sobel_aperture = 3;  // 3, 5 or 7

  void validate() const;
};

/// Parameters of the grayscale -> blur -> Otsu -> Canny baseline.
struct ClassicalConfig {
  int blur_kernel = 11;
  double blur_sigma = 22.0;
  double low_ratio = 0.5;  // low threshold = low_ratio * Otsu threshold
  int sobel_aperture = 5;

  void validate() const;
  friend bool operator==(const ClassicalConfig&, const ClassicalConfig&) = default;
};

/// Sampled Gaussian of odd `size`, normalized to unit sum.
std::vector<double> gaussian_kernel(int size, double sigma);

/// Separable Gaussian blur with reflect-101 borders.
GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma);

/// Otsu threshold over the 256-bin histogram of rounded, clamped gray values.
/// Class 0 is {v <= t}. Ties go to the smallest t; an image with a single
/// occupied bin returns that bin.
double otsu_threshold(const GrayImage& img);

struct Gradients {
  GrayImage dx;
  GrayImage dy;
  GrayImage magnitude;  // L2 norm
};

/// Unnormalized Sobel derivatives (binomial smoothing x central difference)
/// with reflect-101 borders.
Gradients sobel_gradients(const GrayImage& img, int aperture);

/// Gradient direction quantized to 0, 45, 90 or 135 degrees.
enum class GradientDirection { kHorizontal, kDiagonal45, kVertical, kDiagonal135 };
GradientDirection quantize_direction(double dx, double dy) noexcept;

/// Keeps magnitudes that are local maxima across the quantized gradient
/// direction (strictly above one neighbour, at least the other); zero elsewhere.
GrayImage non_max_suppression(const Gradients& grad);

/// Pixels with value >= high seed edges; pixels with value >= low join when
/// 8-connected to a seed through other such pixels. Zero never passes.
EdgeMask hysteresis(const GrayImage& suppressed, double low, double high);

EdgeMask canny(const GrayImage& img, const CannyParams& params);

EdgeMask otsu_canny_pipeline(const RgbImage& img, const ClassicalConfig& cfg = {});

}  // namespace furrow
