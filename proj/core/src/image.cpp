#include "furrow/image.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace furrow {

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
  }
  return out;
}

template <typename Image>
Image crop(const Image& img, const Roi& roi) {
  if (!roi.fits(img.width(), img.height())) {
    throw Error(ErrorCode::kOutOfBounds, "crop ROI outside the image");
  }
  constexpr int C = Image::kChannels;
  Image out(roi.width(), roi.height());
  for (int y = 0; y < roi.height(); ++y) {
    auto src = img.row(y + roi.y_min).subspan(static_cast<std::size_t>(roi.x_min) * C,
                                              static_cast<std::size_t>(roi.width()) * C);
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

WarpTransform WarpTransform::for_image(int width, int height, double angle, double shift_x) {
  return {angle, shift_x, 0.5 * (width - 1), 0.5 * (height - 1)};
}

void WarpTransform::forward(double x, double y, double& out_x, double& out_y) const noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double dx = x - center_x;
  const double dy = y - center_y;
  out_x = center_x + c * dx - s * dy + shift_x;
  out_y = center_y + s * dx + c * dy;
}

void WarpTransform::inverse(double x, double y, double& out_x, double& out_y) const noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double dx = x - shift_x - center_x;
  const double dy = y - center_y;
  out_x = center_x + c * dx + s * dy;
  out_y = center_y - s * dx + c * dy;
}

namespace {

template <typename T>
T round_sample(double v) {
  if constexpr (std::is_integral_v<T>) {
    return static_cast<T>(std::clamp(std::lround(v), 0L, 255L));
  } else {
    return static_cast<T>(v);
  }
}

}  // namespace

template <typename Image>
Image warp_affine(const Image& img, double angle, double shift_x,
                  typename Image::value_type fill, Interpolation interp) {
  using T = typename Image::value_type;
  constexpr int C = Image::kChannels;
  if (std::is_same_v<Image, EdgeMask>) interp = Interpolation::kNearest;

  const int w = img.width();
  const int h = img.height();
  const auto tf = WarpTransform::for_image(w, h, angle, shift_x);
  Image out(w, h, fill);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx = 0.0;
      double sy = 0.0;
      tf.inverse(x, y, sx, sy);
      if (interp == Interpolation::kNearest) {
        const int ix = static_cast<int>(std::floor(sx + 0.5));
        const int iy = static_cast<int>(std::floor(sy + 0.5));
        if (!img.contains(ix, iy)) continue;
        for (int c = 0; c < C; ++c) out.at(x, y, c) = img.at(ix, iy, c);
        continue;
      }
      constexpr double kEps = 1e-9;
      if (sx < -kEps || sy < -kEps || sx > w - 1 + kEps || sy > h - 1 + kEps) continue;
      sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
      sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      const int x0 = std::min(static_cast<int>(sx), w - 1);
      const int y0 = std::min(static_cast<int>(sy), h - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int c = 0; c < C; ++c) {
        const double top = (1 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
        const double bot = (1 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
        out.at(x, y, c) = round_sample<T>((1 - fy) * top + fy * bot);
      }
    }
  }
  return out;
}

#define FURROW_INSTANTIATE_RASTER_OPS(Image)                                       \
  template Image crop<Image>(const Image&, const Roi&);                            \
  template Image warp_affine<Image>(const Image&, double, double, Image::value_type, \
                                    Interpolation);

FURROW_INSTANTIATE_RASTER_OPS(DepthMap)
FURROW_INSTANTIATE_RASTER_OPS(GrayImage)
FURROW_INSTANTIATE_RASTER_OPS(RgbImage)
FURROW_INSTANTIATE_RASTER_OPS(EdgeMask)
FURROW_INSTANTIATE_RASTER_OPS(SoftMask)

#undef FURROW_INSTANTIATE_RASTER_OPS

}  // namespace furrow
