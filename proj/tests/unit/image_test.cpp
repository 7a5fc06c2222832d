#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "furrow/image.hpp"

using namespace furrow;

TEST(Raster, RejectsNonPositiveDimensions) {
  EXPECT_THROW(DepthMap(0, 3), Error);
  EXPECT_THROW(DepthMap(3, -1), Error);
}

TEST(Raster, RejectsDataLengthMismatch) {
  EXPECT_THROW(RgbImage(2, 2, std::vector<std::uint8_t>(11)), Error);
  EXPECT_NO_THROW(RgbImage(2, 2, std::vector<std::uint8_t>(12)));
}

TEST(Raster, RowMajorInterleavedLayout) {
  RgbImage img(3, 2);
  img.at(2, 1, 1) = 7;
  EXPECT_EQ(img.data()[(1 * 3 + 2) * 3 + 1], 7);
  EXPECT_EQ(img.row(1)[2 * 3 + 1], 7);
}

TEST(Depth, ZeroIsTheOnlyInvalidValue) {
  EXPECT_FALSE(is_valid_depth(0.0));
  EXPECT_TRUE(is_valid_depth(0.001));
  EXPECT_TRUE(is_in_sensor_range(0.2));
  EXPECT_TRUE(is_in_sensor_range(10.0));
  EXPECT_FALSE(is_in_sensor_range(0.19));
  EXPECT_FALSE(is_in_sensor_range(10.01));
}

TEST(Grayscale, Bt601Weights) {
  RgbImage img(1, 1);
  img.at(0, 0, 0) = 200;
  img.at(0, 0, 1) = 100;
  img.at(0, 0, 2) = 50;
  EXPECT_NEAR(to_grayscale(img).at(0, 0), 0.299 * 200 + 0.587 * 100 + 0.114 * 50, 1e-9);
}

TEST(Crop, CopiesTheWindow) {
  GrayImage img(4, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) img.at(x, y) = 10 * y + x;
  const GrayImage c = crop(img, Roi{1, 3, 1, 3});
  ASSERT_EQ(c.width(), 2);
  ASSERT_EQ(c.height(), 2);
  EXPECT_EQ(c.at(0, 0), 11);
  EXPECT_EQ(c.at(1, 1), 22);
  EXPECT_THROW(crop(img, Roi{0, 5, 0, 1}), Error);
}

TEST(Warp, IdentityIsExact) {
  GrayImage img(5, 4);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) img.data()[i] = static_cast<double>(i);
  EXPECT_EQ(warp_affine(img, 0.0, 0.0, -1.0), img);
}

TEST(Warp, IntegerShiftMovesColumnsAndFills) {
  EdgeMask m(6, 2);
  m.at(1, 0) = 1;
  const EdgeMask out = warp_affine(m, 0.0, 3.0, std::uint8_t{0});
  EXPECT_EQ(out.at(4, 0), 1);
  EXPECT_EQ(out.at(1, 0), 0);
  const EdgeMask gone = warp_affine(m, 0.0, -3.0, std::uint8_t{0});
  for (auto v : gone.data()) EXPECT_EQ(v, 0);
}

TEST(Warp, ForwardAndInverseAreMutualInverses) {
  const auto t = WarpTransform::for_image(640, 480, 0.07, -12.5);
  double x = 0, y = 0, bx = 0, by = 0;
  t.forward(101.25, 37.5, x, y);
  t.inverse(x, y, bx, by);
  EXPECT_NEAR(bx, 101.25, 1e-9);
  EXPECT_NEAR(by, 37.5, 1e-9);
}

TEST(Warp, QuarterTurnAboutCenter) {
  // Square image: 90 degrees maps corners onto corners.
  GrayImage img(3, 3);
  img.at(0, 0) = 1.0;
  const GrayImage out = warp_affine(img, std::numbers::pi / 2, 0.0, 0.0, Interpolation::kNearest);
  double x = 0, y = 0;
  WarpTransform::for_image(3, 3, std::numbers::pi / 2, 0.0).forward(0, 0, x, y);
  EXPECT_EQ(out.at(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))), 1.0);
}
