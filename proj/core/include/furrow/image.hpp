#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "furrow/error.hpp"

namespace furrow {

/// Row-major raster with interleaved channels. Tag makes each image kind a
/// distinct type even when the sample type and channel count coincide.
template <typename T, int Channels, typename Tag>
class Raster {
 public:
  using value_type = T;
  static constexpr int kChannels = Channels;

  Raster() = default;

  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }

  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height * Channels) {
      throw Error(ErrorCode::kInvalidArgument,
                  "raster data length " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(width) + "x" +
                      std::to_string(height) + "x" + std::to_string(Channels));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y, int c = 0) noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }
  const T& at(int x, int y, int c = 0) const noexcept {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }

  std::span<T> row(int y) noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels,
            static_cast<std::size_t>(width_) * Channels};
  }
  std::span<const T> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_ * Channels,
            static_cast<std::size_t>(width_) * Channels};
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be positive");
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct DepthTag {};
struct GrayTag {};
struct RgbTag {};
struct MaskTag {};
struct SoftMaskTag {};

/// Range in meters; exactly 0.0 marks a pixel without a depth return.
using DepthMap = Raster<double, 1, DepthTag>;
/// Single channel intensity on the 0-255 scale.
using GrayImage = Raster<double, 1, GrayTag>;
using RgbImage = Raster<std::uint8_t, 3, RgbTag>;
/// Binary occupancy, 1 = edge. Stored on disk as {0, 255}.
using EdgeMask = Raster<std::uint8_t, 1, MaskTag>;
/// Edge probability in [0, 1].
using SoftMask = Raster<float, 1, SoftMaskTag>;

inline constexpr double kInvalidDepth = 0.0;
inline constexpr double kSensorMinRange = 0.2;
inline constexpr double kSensorMaxRange = 10.0;

inline bool is_valid_depth(double range) noexcept { return range != kInvalidDepth; }

/// True for returns inside the stereo sensor's rated working range.
inline bool is_in_sensor_range(double range) noexcept {
  return range >= kSensorMinRange && range <= kSensorMaxRange;
}

/// Half-open pixel rectangle [x_min, x_max) x [y_min, y_max).
struct Roi {
  int x_min = 0;
  int x_max = 0;
  int y_min = 0;
  int y_max = 0;

  int width() const noexcept { return x_max - x_min; }
  int height() const noexcept { return y_max - y_min; }
  bool fits(int image_width, int image_height) const noexcept {
    return 0 <= x_min && x_min < x_max && x_max <= image_width && 0 <= y_min &&
           y_min < y_max && y_max <= image_height;
  }

  static Roi full(int width, int height) noexcept { return {0, width, 0, height}; }

  friend bool operator==(const Roi&, const Roi&) = default;
};

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage to_grayscale(const RgbImage& img);

template <typename Image>
Image crop(const Image& img, const Roi& roi);

enum class Interpolation { kNearest, kBilinear };

/// Rotation by `angle` about the image center followed by a horizontal shift.
/// Image coordinates have y pointing down, so a positive angle turns the
/// content clockwise on screen.
struct WarpTransform {
  double angle = 0.0;
  double shift_x = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;

  static WarpTransform for_image(int width, int height, double angle, double shift_x);

  /// Source position -> destination position.
  void forward(double x, double y, double& out_x, double& out_y) const noexcept;
  /// Destination position -> source position.
  void inverse(double x, double y, double& out_x, double& out_y) const noexcept;
};

/// Pixels mapped from outside the source take `fill`. EdgeMask inputs always
/// use nearest-neighbour sampling regardless of `interp`.
template <typename Image>
Image warp_affine(const Image& img, double angle, double shift_x,
                  typename Image::value_type fill,
                  Interpolation interp = Interpolation::kBilinear);

}  // namespace furrow
