#include "furrow/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>

namespace furrow {
namespace {

int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// Correlates rows with `horizontal` and then columns with `vertical`.
GrayImage separable_filter(const GrayImage& img, const std::vector<double>& horizontal,
                           const std::vector<double>& vertical) {
  const int w = img.width();
  const int h = img.height();
  const int rh = static_cast<int>(horizontal.size()) / 2;
  const int rv = static_cast<int>(vertical.size()) / 2;

  GrayImage tmp(w, h);
  std::vector<int> xs(w + 2 * rh);
  for (int i = 0; i < w + 2 * rh; ++i) xs[i] = reflect101(i - rh, w);
  for (int y = 0; y < h; ++y) {
    auto src = img.row(y);
    auto dst = tmp.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < horizontal.size(); ++k) acc += horizontal[k] * src[xs[x + k]];
      dst[x] = acc;
    }
  }

  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    auto dst = out.row(y);
    for (std::size_t k = 0; k < vertical.size(); ++k) {
      auto src = tmp.row(reflect101(y + static_cast<int>(k) - rv, h));
      const double wk = vertical[k];
      for (int x = 0; x < w; ++x) dst[x] += wk * src[x];
    }
  }
  return out;
}

std::vector<double> binomial(int length) {
  std::vector<double> row{1.0};
  for (int i = 1; i < length; ++i) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  return row;
}

// Binomial(k - 2) convolved with [-1, 0, 1].
std::vector<double> sobel_derivative(int aperture) {
  const std::vector<double> base = binomial(aperture - 2);
  std::vector<double> out(aperture, 0.0);
  for (std::size_t j = 0; j < base.size(); ++j) {
    out[j] -= base[j];
    out[j + 2] += base[j];
  }
  return out;
}

}  // namespace

void CannyParams::validate() const {
  if (!(low_threshold >= 0.0) || !(low_threshold <= high_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "canny thresholds need 0 <= low <= high");
  }
  if (sobel_aperture != 3 && sobel_aperture != 5 && sobel_aperture != 7) {
    throw Error(ErrorCode::kInvalidArgument, "sobel aperture must be 3, 5 or 7");
  }
}

void ClassicalConfig::validate() const {
  if (blur_kernel < 1 || blur_kernel % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "blur kernel must be odd and >= 1");
  }
  if (!(blur_sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "blur sigma must be > 0");
  if (!(low_ratio >= 0.0 && low_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "low ratio must be in [0, 1]");
  }
  CannyParams{1.0, low_ratio, sobel_aperture}.validate();
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "gaussian kernel size must be odd and >= 1");
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gaussian sigma must be > 0");
  const int r = size / 2;
  std::vector<double> k(size);
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - r;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& img, int kernel_size, double sigma) {
  const auto k = gaussian_kernel(kernel_size, sigma);
  return separable_filter(img, k, k);
}

double otsu_threshold(const GrayImage& img) {
  if (img.empty()) throw Error(ErrorCode::kInvalidArgument, "otsu on an empty image");
  std::array<std::int64_t, 256> hist{};
  for (double v : img.data()) {
    const long bin = std::clamp(std::lround(v), 0L, 255L);
    ++hist[static_cast<std::size_t>(bin)];
  }

  std::int64_t total = 0;
  std::int64_t total_sum = 0;
  int occupied = 0;
  int only_bin = 0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    total_sum += hist[i] * i;
    if (hist[i] > 0) {
      ++occupied;
      only_bin = i;
    }
  }
  if (occupied == 1) return only_bin;

  // sigma_b^2 * total^2 = (n0 * S - total * s0)^2 / (n0 * n1)
  double best = -1.0;
  int best_t = 0;
  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[t];
    s0 += hist[t] * t;
    const std::int64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const double diff = static_cast<double>(n0 * total_sum - total * s0);
    const double between = diff * diff / (static_cast<double>(n0) * static_cast<double>(n1));
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

Gradients sobel_gradients(const GrayImage& img, int aperture) {
  CannyParams{0.0, 0.0, aperture}.validate();
  const auto smooth = binomial(aperture);
  const auto deriv = sobel_derivative(aperture);
  Gradients g{separable_filter(img, deriv, smooth), separable_filter(img, smooth, deriv),
              GrayImage(img.width(), img.height())};
  auto dx = g.dx.data();
  auto dy = g.dy.data();
  auto mag = g.magnitude.data();
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(dx[i], dy[i]);
  return g;
}

GradientDirection quantize_direction(double dx, double dy) noexcept {
  constexpr double kTan22 = 0.41421356237309503;  // tan(22.5 deg)
  constexpr double kTan67 = 2.414213562373095;    // tan(67.5 deg)
  const double ax = std::abs(dx);
  const double ay = std::abs(dy);
  if (ay <= ax * kTan22) return GradientDirection::kHorizontal;
  if (ay >= ax * kTan67) return GradientDirection::kVertical;
  return (dx > 0) == (dy > 0) ? GradientDirection::kDiagonal45 : GradientDirection::kDiagonal135;
}

GrayImage non_max_suppression(const Gradients& grad) {
  const GrayImage& mag = grad.magnitude;
  const int w = mag.width();
  const int h = mag.height();
  GrayImage out(w, h);
  auto at = [&](int x, int y) { return mag.at(reflect101(x, w), reflect101(y, h)); };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mag.at(x, y);
      if (m <= 0.0) continue;
      double before = 0.0;  // neighbour on the previous row (or left)
      double after = 0.0;
      switch (quantize_direction(grad.dx.at(x, y), grad.dy.at(x, y))) {
        case GradientDirection::kHorizontal:
          before = at(x - 1, y);
          after = at(x + 1, y);
          break;
        case GradientDirection::kVertical:
          before = at(x, y - 1);
          after = at(x, y + 1);
          break;
        case GradientDirection::kDiagonal45:
          before = at(x - 1, y - 1);
          after = at(x + 1, y + 1);
          break;
        case GradientDirection::kDiagonal135:
          before = at(x + 1, y - 1);
          after = at(x - 1, y + 1);
          break;
      }
      if (m > before && m >= after) out.at(x, y) = m;
    }
  }
  return out;
}

EdgeMask hysteresis(const GrayImage& suppressed, double low, double high) {
  const int w = suppressed.width();
  const int h = suppressed.height();
  EdgeMask out(w, h);
  auto candidate = [&](int x, int y) {
    const double v = suppressed.at(x, y);
    return v > 0.0 && v >= low;
  };

  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = suppressed.at(x, y);
      if (v > 0.0 && v >= high && candidate(x, y)) {
        out.at(x, y) = 1;
        queue.emplace_back(x, y);
      }
    }
  }
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (!suppressed.contains(nx, ny) || out.at(nx, ny) || !candidate(nx, ny)) continue;
        out.at(nx, ny) = 1;
        queue.emplace_back(nx, ny);
      }
    }
  }
  return out;
}

EdgeMask canny(const GrayImage& img, const CannyParams& params) {
  params.validate();
  const Gradients grad = sobel_gradients(img, params.sobel_aperture);
  return hysteresis(non_max_suppression(grad), params.low_threshold, params.high_threshold);
}

EdgeMask otsu_canny_pipeline(const RgbImage& img, const ClassicalConfig& cfg) {
  cfg.validate();
  const GrayImage blurred = gaussian_blur(to_grayscale(img), cfg.blur_kernel, cfg.blur_sigma);
  const double high = otsu_threshold(blurred);
  return canny(blurred, {high, cfg.low_ratio * high, cfg.sobel_aperture});
}

}  // namespace furrow
