#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "furrow/guidance.hpp"
#include "furrow/image_io.hpp"
#include "furrow/matcher.hpp"
#include "furrow/scene.hpp"
#include "oracles.hpp"
#include "test_paths.hpp"

using namespace furrow;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

FurrowEdgeModel straight(double c) {
  FurrowEdgeModel m;
  m.c = c;
  return m;
}

FurrowEdgeModel mirrored(const FurrowEdgeModel& m, double cx) {
  FurrowEdgeModel out = m;
  out.a = -m.a;
  out.b = -m.b;
  out.c = 2.0 * cx - m.c;
  return out;
}

}  // namespace

TEST(PixelToGround, LevelCameraPrincipalPointIsHorizon) {
  CameraModel cam = camera_defaults();
  cam.pitch = 0.0;
  try {
    pixel_to_ground(cam, cam.cx, cam.cy);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHorizonOrAbove);
  }
}

TEST(PixelToGround, PrincipalPointClosedForm) {
  const CameraModel cam = camera_defaults();
  const GroundPoint g = pixel_to_ground(cam, cam.cx, cam.cy);
  EXPECT_NEAR(g.z, 0.560 / std::tan(23.0 * kDeg), 1e-12);
  EXPECT_NEAR(g.z, 1.319, 1e-3);
  EXPECT_NEAR(g.x, 0.0, 1e-12);
}

TEST(PixelToGround, MatchesRotationMatrixOracle) {
  const CameraModel cam = camera_defaults();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 639.0), v(120.0, 479.0);
  for (int i = 0; i < 200; ++i) {
    const double pu = u(rng), pv = v(rng);
    double x = 0, z = 0;
    ASSERT_TRUE(oracle::ground_from_pixel(cam, pu, pv, x, z));
    const GroundPoint g = pixel_to_ground(cam, pu, pv);
    EXPECT_NEAR(g.x, x, 1e-9);
    EXPECT_NEAR(g.z, z, 1e-9);
  }
}

TEST(GroundToPixel, RoundTripThousandPixels) {
  const CameraModel cam = camera_defaults();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 639.0), v(110.0, 479.0);
  for (int i = 0; i < 1000; ++i) {
    const double pu = u(rng), pv = v(rng);
    const GroundPoint g = pixel_to_ground(cam, pu, pv);
    const PixelPoint p = ground_to_pixel(cam, g.x, g.z);
    EXPECT_NEAR(p.u, pu, 1e-3);
    EXPECT_NEAR(p.v, pv, 1e-3);
    const PixelPoint q = ground_to_pixel(cam, g.x, g.z);
    const GroundPoint back = pixel_to_ground(cam, q.u, q.v);
    EXPECT_NEAR(back.x, g.x, 1e-6);
    EXPECT_NEAR(back.z, g.z, 1e-6);
  }
}

TEST(GroundToPixel, TrigonometricOracleAtOnePose) {
  const CameraModel cam = camera_defaults();
  const double x = 0.5, z = 2.0;
  // Depression of the point below the optical axis, then pinhole projection.
  const double below_axis = std::atan2(cam.height, z) - 23.0 * kDeg;
  const double slant = std::hypot(cam.height, z);
  const double forward = slant * std::cos(below_axis);
  const PixelPoint p = ground_to_pixel(cam, x, z);
  EXPECT_NEAR(p.v, cam.cy + cam.fy * std::tan(below_axis), 1e-9);
  EXPECT_NEAR(p.u, cam.cx + cam.fx * x / forward, 1e-9);
}

TEST(GroundToPixel, StraightAheadAndPerspective) {
  const CameraModel cam = camera_defaults();
  EXPECT_NEAR(ground_to_pixel(cam, 0.0, 3.0).u, cam.cx, 1e-12);
  EXPECT_LT(ground_to_pixel(cam, 0.0, 9.5).v, ground_to_pixel(cam, 0.0, 1.0).v);
  EXPECT_THROW(ground_to_pixel(cam, 0.0, -1.0), Error);
}

TEST(LaneLines, ZeroWidthCoincidesWithEdge) {
  const CameraModel cam = camera_defaults();
  GuidanceConfig cfg;
  cfg.wheel_width = 0.0;
  FurrowEdgeModel m;
  m.a = 0.0004;
  m.b = -0.1;
  m.c = 420.0;
  const LaneLines l = lane_lines(m, cam, cfg);
  ASSERT_EQ(l.left.size(), l.edge.size());
  for (std::size_t i = 0; i < l.edge.size(); ++i) {
    EXPECT_NEAR(l.left[i].u, l.edge[i].u, 1e-9);
    EXPECT_NEAR(l.right[i].v, l.edge[i].v, 1e-9);
  }
}

TEST(LaneLines, GroundOffsetIsWheelWidth) {
  const CameraModel cam = camera_defaults();
  const GuidanceConfig cfg;
  const LaneLines l = lane_lines(straight(400.0), cam, cfg);
  for (std::size_t i = 0; i < l.edge.size(); ++i) {
    const GroundPoint e = pixel_to_ground(cam, l.edge[i].u, l.edge[i].v);
    const GroundPoint left = pixel_to_ground(cam, l.left[i].u, l.left[i].v);
    const GroundPoint right = pixel_to_ground(cam, l.right[i].u, l.right[i].v);
    EXPECT_NEAR(e.x - left.x, 0.530, 1e-6);
    EXPECT_NEAR(right.x - e.x, 0.530, 1e-6);
    EXPECT_NEAR(left.z, e.z, 1e-6);
  }
}

TEST(LaneLines, OffsetThenInverseOffsetRestoresCurve) {
  const CameraModel cam = camera_defaults();
  const LaneLines l = lane_lines(straight(380.0), cam, GuidanceConfig{});
  for (std::size_t i = 0; i < l.edge.size(); ++i) {
    const GroundPoint g = pixel_to_ground(cam, l.left[i].u, l.left[i].v);
    const PixelPoint back = ground_to_pixel(cam, g.x + 0.530, g.z);
    EXPECT_NEAR(back.u, l.edge[i].u, 1e-6);
    EXPECT_NEAR(back.v, l.edge[i].v, 1e-6);
  }
}

TEST(LaneLines, GapMatchesRenderedGroundSegment) {
  const CameraModel cam = camera_defaults();
  SceneSpec spec;
  spec.edge_gamma = 0.3;
  const auto truth = ground_truth_edge(cam, spec);
  const auto det = detect_furrow(render(cam, spec).depth, DetectorConfig{});
  const LaneLines l = lane_lines(det, cam, GuidanceConfig{});
  int checked = 0;
  for (std::size_t i = 0; i < l.edge.size(); ++i) {
    const int row = static_cast<int>(l.edge[i].v);
    if (row < 200) continue;
    double x = 0, z = 0;
    ASSERT_TRUE(oracle::ground_from_pixel(cam, cam.cx, row, x, z));
    // Renderer projection of a 2 * 0.530 m ground segment at this row's range.
    const double forward = -cam.height * std::sin(cam.pitch) + z * std::cos(cam.pitch);
    const double b_minus_a = cam.fx * 2.0 * 0.530 / forward;
    EXPECT_NEAR(l.right[i].u - l.left[i].u, b_minus_a, 1.0) << row;
    ++checked;
  }
  EXPECT_GT(checked, 50);
  EXPECT_FALSE(truth.empty());
}

TEST(Departure, AbsentModelIsNoEdge) {
  const auto s = departure_status(std::nullopt, camera_defaults(), GuidanceConfig{});
  EXPECT_EQ(s.state, DepartureState::kNoEdge);
  EXPECT_TRUE(std::isnan(s.lateral_offset));
  EXPECT_EQ(departure_state_name(s.state), "NO_EDGE");
}

TEST(Departure, WheelOnEdgeIsOk) {
  const CameraModel cam = camera_defaults();
  GuidanceConfig cfg;
  cfg.wheel_column = 431.0;
  const auto s = departure_status(straight(431.0), cam, cfg);
  EXPECT_EQ(s.state, DepartureState::kOk);
  EXPECT_NEAR(s.lateral_offset, 0.0, 1e-12);
}

TEST(Departure, WheelRightOfEdgeOnRenderedScene) {
  const CameraModel cam = camera_defaults();
  const SceneSpec spec;  // edge at X = 0.3 m
  const FurrowEdgeModel m = detect_furrow(render(cam, spec).depth, DetectorConfig{});
  GuidanceConfig cfg;
  cfg.wheel_column = ground_to_pixel(cam, 0.5, cfg.lookahead).u;
  const auto s = departure_status(m, cam, cfg);
  EXPECT_EQ(s.state, DepartureState::kWarnRight);
  EXPECT_NEAR(s.lateral_offset, 0.2, 0.02);
}

TEST(Departure, MirroringSwapsWarningsAndNegatesOffset) {
  const CameraModel cam = camera_defaults();
  FurrowEdgeModel m;
  m.a = 0.0003;
  m.b = 0.2;
  m.c = 250.0;
  GuidanceConfig cfg;
  cfg.wheel_column = 150.0;
  const auto s = departure_status(m, cam, cfg);
  GuidanceConfig mcfg = cfg;
  mcfg.wheel_column = 2 * cam.cx - 150.0;
  const auto t = departure_status(mirrored(m, cam.cx), cam, mcfg);
  EXPECT_NEAR(s.lateral_offset, -t.lateral_offset, 1e-9);
  ASSERT_NE(s.state, DepartureState::kOk);
  EXPECT_EQ(s.state == DepartureState::kWarnLeft, t.state == DepartureState::kWarnRight);
}

TEST(Departure, ThresholdBoundaries) {
  const CameraModel cam = camera_defaults();
  GuidanceConfig cfg;
  cfg.wheel_column = ground_to_pixel(cam, 0.05, cfg.lookahead).u;
  EXPECT_EQ(departure_status(straight(cam.cx), cam, cfg).state, DepartureState::kOk);
  cfg.wheel_column = ground_to_pixel(cam, -0.15, cfg.lookahead).u;
  EXPECT_EQ(departure_status(straight(cam.cx), cam, cfg).state, DepartureState::kWarnLeft);
}

TEST(Departure, LookaheadOutOfViewThrows) {
  GuidanceConfig cfg;
  cfg.lookahead = 0.2;  // below the bottom row
  try {
    departure_status(straight(320.0), camera_defaults(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLookaheadNotVisible);
  }
}

TEST(Overlay, AbsentModelOnlyAddsGrayBorder) {
  RgbImage rgb(40, 30, 17);
  const DepartureStatus none{DepartureState::kNoEdge, std::nan("")};
  const RgbImage out = render_overlay(rgb, std::nullopt, std::nullopt, none);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const bool border = x < kOverlayBorder || y < kOverlayBorder || x >= 40 - kOverlayBorder ||
                          y >= 30 - kOverlayBorder;
      EXPECT_EQ(out.at(x, y, 0), border ? 128 : 17);
    }
  }
}

TEST(Overlay, ChangedPixelsBoundedByPolylineLength) {
  const CameraModel cam = camera_defaults();
  const FurrowEdgeModel m = straight(420.0);
  const LaneLines lanes = lane_lines(m, cam, GuidanceConfig{});
  const RgbImage rgb(640, 480, 50);
  const DepartureStatus st = departure_status(m, cam, GuidanceConfig{});
  const RgbImage out = render_overlay(rgb, m, lanes, st);
  auto length = [](const std::vector<PixelPoint>& l) {
    double s = 0.0;
    for (std::size_t i = 1; i < l.size(); ++i)
      s += std::max(std::abs(l[i].u - l[i - 1].u), std::abs(l[i].v - l[i - 1].v)) + 1.0;
    return s;
  };
  const double bound = (length(lanes.edge) + length(lanes.left) + length(lanes.right)) * kOverlayStroke;
  std::size_t changed = 0;
  for (int y = kOverlayBorder; y < 480 - kOverlayBorder; ++y)
    for (int x = kOverlayBorder; x < 640 - kOverlayBorder; ++x) changed += out.at(x, y, 0) != 50;
  EXPECT_GT(changed, 0u);
  EXPECT_LE(static_cast<double>(changed), bound);
}

TEST(Overlay, GoldenImage) {
  const CameraModel cam = camera_defaults();
  const auto scene = render(cam, random_scene(3));
  const FurrowEdgeModel m = detect_furrow(scene.depth, DetectorConfig{});
  const GuidanceConfig cfg;
  const RgbImage out =
      render_overlay(scene.rgb, m, lane_lines(m, cam, cfg), departure_status(m, cam, cfg));
  const auto golden = furrow::testing::data_dir() / "golden_overlay.png";
  if (std::getenv("FURROW_UPDATE_GOLDEN")) save_rgb(out, golden);
  const RgbImage expected = load_rgb(golden);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < out.data().size(); ++i) differing += out.data()[i] != expected.data()[i];
  EXPECT_EQ(differing, 0u);
}
