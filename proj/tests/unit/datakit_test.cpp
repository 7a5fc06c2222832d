#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "furrow/datakit.hpp"
#include "furrow/scene.hpp"

using namespace furrow;

namespace {

bool empty(const EdgeMask& m) {
  return std::none_of(m.data().begin(), m.data().end(), [](std::uint8_t v) { return v != 0; });
}

FurrowEdgeModel curve(double a, double b, double c) {
  FurrowEdgeModel m;
  m.a = a;
  m.b = b;
  m.c = c;
  return m;
}

bool eight_connected(const EdgeMask& m) {
  // Every row with pixels touches the next non-empty row.
  int prev_min = -1, prev_max = -1;
  for (int y = 0; y < m.height(); ++y) {
    int lo = m.width(), hi = -1;
    for (int x = 0; x < m.width(); ++x) {
      if (m.at(x, y)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (hi < 0) continue;
    if (prev_max >= 0 && (lo > prev_max + 1 || hi < prev_min - 1)) return false;
    prev_min = lo;
    prev_max = hi;
  }
  return true;
}

}  // namespace

TEST(RasterizeLabel, OnePixelPerRowForSteepCurve) {
  const EdgeMask m = rasterize_label(curve(0.0, 0.1, 300.0), 640, 480);
  for (int y = 0; y < 480; ++y) {
    int count = 0;
    for (int x = 0; x < 640; ++x) count += m.at(x, y);
    EXPECT_EQ(count, 1);
    EXPECT_EQ(m.at(static_cast<int>(std::lround(300.0 + 0.1 * y)), y), 1);
  }
}

TEST(RasterizeLabel, ShallowCurveStaysEightConnected) {
  const EdgeMask m = rasterize_label(curve(0.001, -0.9, 500.0), 640, 480);
  EXPECT_TRUE(eight_connected(m));
}

TEST(RasterizeLabel, OutOfFrameThrows) {
  try {
    rasterize_label(curve(0.0, 0.0, -50.0), 640, 480);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfFrame);
  }
}

TEST(QualityFilter, DefaultGate) {
  FurrowEdgeModel m;
  m.inlier_ratio = 0.6;
  m.candidate_count = 10;
  EXPECT_TRUE(quality_filter(m, QualityGate{}));
  m.inlier_ratio = 0.59;
  EXPECT_FALSE(quality_filter(m, QualityGate{}));
  m.inlier_ratio = 0.9;
  m.candidate_count = 9;
  EXPECT_FALSE(quality_filter(m, 0.6, 10));
}

TEST(AugmentSpec, Defaults) {
  const AugmentSpec s;
  EXPECT_NEAR(s.max_rotation, 5.0 * std::acos(-1.0) / 180.0, 1e-15);
  EXPECT_EQ(s.max_shift, 60.0);
  EXPECT_EQ(s.crop_size, 400);
  EXPECT_EQ(s.negative_fraction, 0.1);
}

TEST(Augment, IdentityTransformIsPlainCrop) {
  const auto scene = render(camera_defaults(), SceneSpec{});
  AugmentSpec spec;
  spec.max_rotation = 0.0;
  spec.max_shift = 0.0;
  spec.negative_fraction = 0.0;
  spec.copies_per_frame = 3;
  const auto res = augment(scene.depth, scene.edge_mask, spec);
  ASSERT_EQ(res.samples.size(), 3u);
  const Roi w = augment_crop_window(scene.edge_mask, 400);
  for (const auto& s : res.samples) {
    EXPECT_EQ(s.image, crop(scene.depth, w));
    EXPECT_EQ(s.mask, crop(scene.edge_mask, w));
    EXPECT_TRUE(s.has_edge);
  }
}

TEST(Augment, CropWindowIsBottomAnchoredAndInside) {
  const auto scene = render(camera_defaults(), random_scene(4));
  const Roi w = augment_crop_window(scene.edge_mask, 400);
  EXPECT_EQ(w.y_max, 480);
  EXPECT_EQ(w.height(), 400);
  EXPECT_GE(w.x_min, 0);
  EXPECT_LE(w.x_max, 640);
  EXPECT_THROW(augment_crop_window(EdgeMask(300, 300), 400), Error);
}

TEST(Augment, SameTransformOnImageAndMask) {
  const auto scene = render(camera_defaults(), random_scene(8));
  AugmentSpec spec;
  spec.copies_per_frame = 10;
  spec.negative_fraction = 0.0;
  spec.rng_seed = 3;
  const auto res = augment(scene.depth, scene.edge_mask, spec);
  for (const auto& s : res.samples) {
    const DepthMap expect_img =
        crop(warp_affine(scene.depth, s.angle, s.shift, 0.0, Interpolation::kNearest), s.crop);
    const EdgeMask expect_mask = crop(warp_affine(scene.edge_mask, s.angle, s.shift, std::uint8_t{0}), s.crop);
    EXPECT_EQ(s.image, expect_img);
    EXPECT_EQ(s.mask, expect_mask);
    EXPECT_LE(std::abs(s.angle), spec.max_rotation);
    EXPECT_LE(std::abs(s.shift), spec.max_shift);
    EXPECT_EQ(s.has_edge, !empty(s.mask));
  }
}

TEST(Augment, NegativesAreVerifiedEmpty) {
  const auto scene = render(camera_defaults(), random_scene(6));
  AugmentSpec spec;
  spec.copies_per_frame = 200;
  spec.negative_fraction = 0.5;
  spec.rng_seed = 17;
  const auto res = augment(scene.rgb, scene.edge_mask, spec);
  int negatives = 0;
  for (const auto& s : res.samples) {
    if (!s.has_edge) {
      ++negatives;
      EXPECT_TRUE(empty(s.mask));
    }
  }
  EXPECT_GT(negatives, 60);
  EXPECT_EQ(res.samples.size() + static_cast<std::size_t>(res.skipped_negatives), 200u);
}

TEST(Augment, DeterministicPerSeed) {
  const auto scene = render(camera_defaults(), random_scene(9));
  AugmentSpec spec;
  spec.copies_per_frame = 5;
  spec.rng_seed = 99;
  const auto a = augment(scene.depth, scene.edge_mask, spec);
  const auto b = augment(scene.depth, scene.edge_mask, spec);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].image, b.samples[i].image);
    EXPECT_EQ(a.samples[i].angle, b.samples[i].angle);
  }
}

TEST(Augment, SizeMismatchRejected) {
  EXPECT_THROW(augment(DepthMap(640, 480), EdgeMask(600, 480), AugmentSpec{}), Error);
}
