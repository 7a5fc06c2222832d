#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "furrow/matcher.hpp"
#include "furrow/scene.hpp"
#include "oracles.hpp"

using namespace furrow;

namespace {

// Depth map with a vertical step at column `edge`: near on the left.
DepthMap step_map(int w, int h, int edge, double left = 1.0, double right = 1.2) {
  DepthMap d(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) d.at(x, y) = x < edge ? left : right;
  return d;
}

std::vector<CandidatePoint> parabola_points(double a, double b, double c, int n, double y0 = 20.0,
                                            double dy = 5.0) {
  std::vector<CandidatePoint> pts;
  for (int i = 0; i < n; ++i) {
    const double y = y0 + i * dy;
    pts.push_back({(a * y + b) * y + c, y, 1.0, i});
  }
  return pts;
}

}  // namespace

TEST(DetectorConfig, GoldenDefaults) {
  const DetectorConfig cfg;
  EXPECT_EQ(cfg.starting_depth, 0.92);
  EXPECT_EQ(cfg.band_width, 25);
  EXPECT_EQ(cfg.band_shift, 5);
  EXPECT_FALSE(cfg.max_bands.has_value());
  EXPECT_EQ(cfg.ransac_threshold, 30.0);
  EXPECT_EQ(cfg.score_threshold, 0.0);
  EXPECT_EQ(cfg.roi, (Roi{250, 640, 0, 480}));
  EXPECT_EQ(cfg.fit_degree, 2);
  EXPECT_EQ(cfg.template_size, 30);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(DetectorConfig, ValidationRejectsBadValues) {
  DetectorConfig cfg;
  cfg.template_size = 31;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.fit_degree = 3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.roi = {600, 620, 0, 480};
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(StepTemplate, ZeroMeanUnitNorm) {
  const Template t = make_step_template(30);
  double sum = 0.0, sq = 0.0;
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 30; ++x) {
      sum += t.at(x, y);
      sq += t.at(x, y) * t.at(x, y);
      EXPECT_EQ(t.at(x, y) < 0, x < 15);
    }
  }
  EXPECT_NEAR(sum, 0.0, 1e-12);
  EXPECT_NEAR(sq, 1.0, 1e-12);
  EXPECT_THROW(make_step_template(7), Error);
}

TEST(Ncc, MatchesDirectFormula) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.5, 3.0);
  const Template t = make_step_template(30);
  for (int trial = 0; trial < 50; ++trial) {
    DepthMap patch(30, 30);
    for (double& v : patch.data()) v = dist(rng);
    std::vector<double> a(patch.data().begin(), patch.data().end());
    std::vector<double> b;
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 30; ++x) b.push_back(t.at(x, y));
    EXPECT_NEAR(ncc_score(patch, t), oracle::direct_ncc(a, b), 1e-9);
  }
}

TEST(Ncc, PerfectStepScoresOne) {
  const Template t = make_step_template(30);
  EXPECT_NEAR(ncc_score(step_map(30, 30, 15), t), 1.0, 1e-12);
  EXPECT_NEAR(ncc_score(step_map(30, 30, 15, 1.2, 1.0), t), -1.0, 1e-12);
}

TEST(Ncc, FlatPatchIsNoMatch) {
  EXPECT_EQ(ncc_score(DepthMap(30, 30, 1.5), make_step_template(30)), kNoMatchScore);
}

TEST(Ncc, InvalidFractionGate) {
  const Template t = make_step_template(10);
  DepthMap d = step_map(10, 10, 5);
  for (int i = 0; i < 30; ++i) d.data()[i] = 0.0;  // exactly 30%
  EXPECT_GT(ncc_score(d, t), 0.9);
  d.data()[30] = 0.0;
  EXPECT_EQ(ncc_score(d, t), kNoMatchScore);
}

TEST(Ncc, HolesAreExcludedNotTreatedAsZero) {
  const Template t = make_step_template(10);
  DepthMap d = step_map(10, 10, 5);
  d.at(0, 0) = 0.0;
  d.at(9, 9) = 0.0;
  EXPECT_NEAR(ncc_score(d, t), 1.0, 1e-12);
}

TEST(StartRow, BottomMostRowReachingDepth) {
  DepthMap d(300, 100);
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 300; ++x) d.at(x, y) = 2.0 - 0.0149 * y;  // nearer at the bottom
  DetectorConfig cfg;
  cfg.roi = {0, 300, 0, 100};
  // 2.0 - 0.0149 y >= 0.92  <=>  y <= 72.48
  EXPECT_EQ(start_row(d, cfg), 72);
}

TEST(StartRow, AllInvalidThrowsNoStartRow) {
  DetectorConfig cfg;
  try {
    start_row(DepthMap(640, 480), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoStartRow);
  }
}

TEST(StartRow, RoiMustFit) {
  DetectorConfig cfg;
  EXPECT_THROW(start_row(DepthMap(320, 240, 1.0), cfg), Error);
}

TEST(BandLayout, StepsUpByShiftUntilTemplateLeavesRoi) {
  DetectorConfig cfg;
  const auto bands = band_layout(100, cfg);
  ASSERT_FALSE(bands.empty());
  EXPECT_EQ(bands.front().center_row, 100);
  EXPECT_EQ(bands.front().top, 100 - 12);
  EXPECT_EQ(bands.front().bottom - bands.front().top, 25);
  for (std::size_t k = 0; k < bands.size(); ++k) {
    EXPECT_EQ(bands[k].center_row, 100 - 5 * static_cast<int>(k));
    EXPECT_GE(bands[k].center_row - 15, 0);
  }
  EXPECT_LT(bands.back().center_row - 5 - 15, 0);
  cfg.max_bands = 3;
  EXPECT_EQ(band_layout(100, cfg).size(), 3u);
}

TEST(ScanBands, FindsStraightStep) {
  DepthMap d = step_map(640, 480, 400);
  DetectorConfig cfg;
  const auto pts = scan_bands(d, cfg, make_step_template(cfg.template_size));
  ASSERT_FALSE(pts.empty());
  for (const auto& p : pts) {
    EXPECT_NEAR(p.x, 399.5, 1e-9);
    EXPECT_NEAR(p.score, 1.0, 1e-9);
  }
  // Only bands whose template is mostly outside the image are skipped.
  EXPECT_GT(pts.front().y + cfg.template_size / 2, 480.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(pts[i].band_index, pts.front().band_index + static_cast<int>(i));
  }
}

TEST(ScanBands, ScoreThresholdDropsWeakBands) {
  DepthMap d = step_map(640, 480, 400);
  DetectorConfig cfg;
  cfg.score_threshold = 1.0;
  // Rounding may keep some perfect scores; nothing below 1 survives.
  for (const auto& p : scan_bands(d, cfg, make_step_template(30))) EXPECT_GE(p.score, 1.0);
}

TEST(Ransac, NoiselessExactRecovery) {
  const auto pts = parabola_points(0.01, 0.5, 100.0, 20);
  const FurrowEdgeModel m = fit_parabola_ransac(pts, DetectorConfig{});
  EXPECT_NEAR(m.a, 0.01, 1e-6);
  EXPECT_NEAR(m.b, 0.5, 1e-6);
  EXPECT_NEAR(m.c, 100.0, 1e-6);
  EXPECT_EQ(m.inlier_ratio, 1.0);
  EXPECT_EQ(m.candidate_count, 20u);
}

TEST(Ransac, IgnoresGrossOutliers) {
  auto pts = parabola_points(0.002, -0.3, 420.0, 40, 100.0, 5.0);
  pts[3].x += 200;
  pts[17].x -= 150;
  pts[30].x += 90;
  const FurrowEdgeModel m = fit_parabola_ransac(pts, DetectorConfig{});
  EXPECT_NEAR(m.a, 0.002, 1e-9);
  EXPECT_NEAR(m.b, -0.3, 1e-7);
  EXPECT_NEAR(m.c, 420.0, 1e-5);
  EXPECT_EQ(m.inlier_indices.size(), 37u);
}

TEST(Ransac, DeterministicPerSeed) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 4.0);
  auto pts = parabola_points(0.001, 0.2, 300.0, 60, 50.0, 5.0);
  for (auto& p : pts) p.x += noise(rng);
  DetectorConfig cfg;
  EXPECT_EQ(fit_parabola_ransac(pts, cfg), fit_parabola_ransac(pts, cfg));
}

TEST(Ransac, NeedsThreeDistinctRows) {
  std::vector<CandidatePoint> pts{{1, 5, 1, 0}, {2, 5, 1, 1}, {3, 6, 1, 2}};
  try {
    fit_parabola_ransac(pts, DetectorConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientPoints);
  }
}

TEST(LeastSquares, ExactOnThreePoints) {
  const auto pts = parabola_points(-0.02, 1.0, 5.0, 3);
  const FurrowEdgeModel m = fit_parabola_least_squares(pts);
  EXPECT_NEAR(m.a, -0.02, 1e-10);
  EXPECT_NEAR(m.b, 1.0, 1e-9);
  EXPECT_NEAR(m.c, 5.0, 1e-7);
}

TEST(DetectFurrow, AllInvalidMapIsNoStartRow) {
  try {
    detect_furrow(DepthMap(640, 480), DetectorConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoStartRow);
  }
}

TEST(DetectFurrow, DeterministicBitForBit) {
  const auto scene = render(camera_defaults(), random_scene(5), CorruptionSpec{0.002, 10, 8.0, {}, 3});
  EXPECT_EQ(detect_furrow(scene.depth, DetectorConfig{}), detect_furrow(scene.depth, DetectorConfig{}));
}

TEST(DetectFurrow, DetailedAgreesWithPlain) {
  const auto scene = render(camera_defaults(), SceneSpec{});
  const auto det = detect_furrow_detailed(scene.depth, DetectorConfig{});
  EXPECT_EQ(det.model, detect_furrow(scene.depth, DetectorConfig{}));
  EXPECT_EQ(det.model.candidate_count, det.candidates.size());
}
