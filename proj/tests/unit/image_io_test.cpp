#include <gtest/gtest.h>

#include <fstream>

#include "furrow/image_io.hpp"
#include "test_paths.hpp"

using namespace furrow;

TEST(DepthIo, PgmValue920IsPoint92Meters) {
  const auto dir = furrow::testing::scratch_dir();
  const auto path = dir / "d.pgm";
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n2 1\n65535\n";
    const unsigned char px[] = {0x03, 0x98, 0x00, 0x00};  // 920, 0 big-endian
    out.write(reinterpret_cast<const char*>(px), sizeof(px));
  }
  const DepthMap d = load_depth(path);
  EXPECT_DOUBLE_EQ(d.at(0, 0), 0.92);
  EXPECT_EQ(d.at(1, 0), 0.0);
  EXPECT_FALSE(is_valid_depth(d.at(1, 0)));
}

TEST(DepthIo, PngRoundTripAtMillimeterScale) {
  const auto dir = furrow::testing::scratch_dir();
  DepthMap d(3, 2);
  d.at(0, 0) = 1.234;
  d.at(2, 1) = 9.999;
  save_depth(d, dir / "d.png");
  const DepthMap back = load_depth(dir / "d.png");
  for (std::size_t i = 0; i < d.pixel_count(); ++i) EXPECT_NEAR(back.data()[i], d.data()[i], 1e-12);
}

TEST(DepthIo, CustomScale) {
  const auto dir = furrow::testing::scratch_dir();
  DepthMap d(1, 1, 2.5);
  save_depth(d, dir / "d.pgm", 0.0001);
  EXPECT_DOUBLE_EQ(load_depth(dir / "d.pgm", 0.0001).at(0, 0), 2.5);
  EXPECT_DOUBLE_EQ(load_depth(dir / "d.pgm", 0.001).at(0, 0), 25.0);
}

TEST(DepthIo, OverflowIsReported) {
  const auto dir = furrow::testing::scratch_dir();
  DepthMap d(1, 1, 70.0);
  try {
    save_depth(d, dir / "d.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverflow);
  }
}

TEST(DepthIo, EightBitInputIsAFormatError) {
  const auto dir = furrow::testing::scratch_dir();
  save_mask(EdgeMask(2, 2), dir / "m.png");
  try {
    load_depth(dir / "m.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

TEST(DepthIo, MissingFileIsAnIoError) {
  try {
    load_depth("/nonexistent/depth.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(RgbIo, PngAndPpmRoundTrip) {
  const auto dir = furrow::testing::scratch_dir();
  RgbImage img(4, 3);
  for (std::size_t i = 0; i < img.data().size(); ++i) img.data()[i] = static_cast<std::uint8_t>(i * 17);
  save_rgb(img, dir / "a.png");
  save_rgb(img, dir / "a.ppm");
  EXPECT_EQ(load_rgb(dir / "a.png"), img);
  EXPECT_EQ(load_rgb(dir / "a.ppm"), img);
}

TEST(MaskIo, StoredAs0And255) {
  const auto dir = furrow::testing::scratch_dir();
  EdgeMask m(3, 1);
  m.at(1, 0) = 1;
  save_mask(m, dir / "m.png");
  EXPECT_EQ(load_mask(dir / "m.png"), m);
  EXPECT_FLOAT_EQ(load_soft_mask(dir / "m.png").at(1, 0), 1.0f);
}

TEST(SoftMaskIo, QuantizedTo8Bits) {
  const auto dir = furrow::testing::scratch_dir();
  SoftMask m(2, 1);
  m.at(0, 0) = 0.5f;
  m.at(1, 0) = 0.25f;
  save_soft_mask(m, dir / "s.png");
  const SoftMask back = load_soft_mask(dir / "s.png");
  EXPECT_NEAR(back.at(0, 0), 0.5f, 0.5f / 255.0f + 1e-6f);
  EXPECT_NEAR(back.at(1, 0), 0.25f, 0.5f / 255.0f + 1e-6f);
}
