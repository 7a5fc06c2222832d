#include "furrow/guidance.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace furrow {

GroundPoint pixel_to_ground(const CameraModel& camera, double u, double v) {
  const double xn = (u - camera.cx) / camera.fx;
  const double yn = (v - camera.cy) / camera.fy;
  const double sp = std::sin(camera.pitch);
  const double cp = std::cos(camera.pitch);
  // Camera axes in the world frame: right (1,0,0), down (0,-cp,sp), forward (0,sp,cp).
  const double dir_y = -yn * cp + sp;
  const double dir_z = yn * sp + cp;
  constexpr double kGrazing = 1e-12;
  if (dir_y > -kGrazing) {
    throw Error(ErrorCode::kHorizonOrAbove, "pixel ray does not reach the ground");
  }
  const double t = camera.height / -dir_y;
  const GroundPoint g{t * xn, t * dir_z};
  if (!(g.z > 0.0)) throw Error(ErrorCode::kHorizonOrAbove, "ground hit is behind the camera");
  return g;
}

PixelPoint ground_to_pixel(const CameraModel& camera, double x, double z) {
  const double sp = std::sin(camera.pitch);
  const double cp = std::cos(camera.pitch);
  // Ground point relative to the camera center is (x, -height, z).
  const double xc = x;
  const double yc = camera.height * cp + z * sp;
  const double zc = -camera.height * sp + z * cp;
  if (!(z > 0.0) || !(zc > 0.0)) {
    throw Error(ErrorCode::kBehindCamera, "ground point is behind the camera");
  }
  return {camera.cx + camera.fx * xc / zc, camera.cy + camera.fy * yc / zc};
}

void GuidanceConfig::validate() const {
  if (!(wheel_width >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "wheel_width must be >= 0");
  if (!(lookahead > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lookahead must be > 0");
  if (!(warn_threshold >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "warn_threshold must be >= 0");
  if (!(max_distance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "max_distance must be > 0");
}

LaneLines lane_lines(const FurrowEdgeModel& model, const CameraModel& camera,
                     const GuidanceConfig& cfg) {
  cfg.validate();
  LaneLines lanes;
  for (int v = 0; v < camera.image_height; ++v) {
    const double u = model(v);
    GroundPoint g;
    try {
      g = pixel_to_ground(camera, u, v);
    } catch (const Error&) {
      continue;
    }
    if (g.z > cfg.max_distance) continue;
    lanes.edge.push_back({u, static_cast<double>(v)});
    lanes.left.push_back(ground_to_pixel(camera, g.x - cfg.wheel_width, g.z));
    lanes.right.push_back(ground_to_pixel(camera, g.x + cfg.wheel_width, g.z));
  }
  if (lanes.edge.empty()) {
    throw Error(ErrorCode::kHorizonOrAbove, "edge curve has no ground-visible rows");
  }
  return lanes;
}

std::string_view departure_state_name(DepartureState state) noexcept {
  switch (state) {
    case DepartureState::kOk: return "OK";
    case DepartureState::kWarnLeft: return "WARN_LEFT";
    case DepartureState::kWarnRight: return "WARN_RIGHT";
    case DepartureState::kNoEdge: return "NO_EDGE";
  }
  return "NO_EDGE";
}

DepartureStatus departure_status(const std::optional<FurrowEdgeModel>& model,
                                 const CameraModel& camera, const GuidanceConfig& cfg) {
  if (!model) return {DepartureState::kNoEdge, std::numeric_limits<double>::quiet_NaN()};
  cfg.validate();

  PixelPoint ahead;
  try {
    ahead = ground_to_pixel(camera, 0.0, cfg.lookahead);
  } catch (const Error&) {
    throw Error(ErrorCode::kLookaheadNotVisible, "lookahead point is behind the camera");
  }
  if (ahead.v < 0.0 || ahead.v > camera.image_height - 1) {
    throw Error(ErrorCode::kLookaheadNotVisible, "lookahead row is outside the image");
  }
  const double edge_x = pixel_to_ground(camera, (*model)(ahead.v), ahead.v).x;
  const double wheel_x = pixel_to_ground(camera, cfg.wheel_column.value_or(camera.cx), ahead.v).x;
  const double offset = wheel_x - edge_x;

  DepartureState state = DepartureState::kOk;
  if (offset < -cfg.warn_threshold) {
    state = DepartureState::kWarnLeft;
  } else if (offset > cfg.warn_threshold) {
    state = DepartureState::kWarnRight;
  }
  return {state, offset};
}

namespace {

using Color = std::array<std::uint8_t, 3>;

constexpr Color kEdgeColor{255, 220, 0};
constexpr Color kLaneColor{0, 160, 255};

Color status_color(DepartureState state) noexcept {
  switch (state) {
    case DepartureState::kOk: return {0, 200, 0};
    case DepartureState::kWarnLeft:
    case DepartureState::kWarnRight: return {230, 0, 0};
    case DepartureState::kNoEdge: return {128, 128, 128};
  }
  return {128, 128, 128};
}

void put(RgbImage& img, int x, int y, const Color& color) {
  if (!img.contains(x, y)) return;
  for (int c = 0; c < 3; ++c) img.at(x, y, c) = color[c];
}

// Bresenham with a `kOverlayStroke` run across the major axis at each step.
void draw_segment(RgbImage& img, const PixelPoint& a, const PixelPoint& b, const Color& color) {
  constexpr double kLimit = 1e6;
  if (!std::isfinite(a.u) || !std::isfinite(a.v) || !std::isfinite(b.u) || !std::isfinite(b.v) ||
      std::abs(a.u) > kLimit || std::abs(a.v) > kLimit || std::abs(b.u) > kLimit ||
      std::abs(b.v) > kLimit) {
    return;
  }
  int x0 = static_cast<int>(std::lround(a.u));
  int y0 = static_cast<int>(std::lround(a.v));
  const int x1 = static_cast<int>(std::lround(b.u));
  const int y1 = static_cast<int>(std::lround(b.v));
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  const bool mostly_vertical = -dy > dx;
  const int first = -kOverlayStroke / 2;
  int err = dx + dy;
  while (true) {
    for (int k = first; k < first + kOverlayStroke; ++k) {
      if (mostly_vertical) {
        put(img, x0 + k, y0, color);
      } else {
        put(img, x0, y0 + k, color);
      }
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_polyline(RgbImage& img, const std::vector<PixelPoint>& line, const Color& color) {
  if (line.size() == 1) draw_segment(img, line[0], line[0], color);
  for (std::size_t i = 1; i < line.size(); ++i) draw_segment(img, line[i - 1], line[i], color);
}

}  // namespace

RgbImage render_overlay(const RgbImage& rgb, const std::optional<FurrowEdgeModel>& model,
                        const std::optional<LaneLines>& lanes, const DepartureStatus& status) {
  RgbImage out = rgb;
  if (lanes) {
    draw_polyline(out, lanes->left, kLaneColor);
    draw_polyline(out, lanes->right, kLaneColor);
    draw_polyline(out, lanes->edge, kEdgeColor);
  } else if (model) {
    std::vector<PixelPoint> curve;
    for (int v = 0; v < out.height(); ++v) curve.push_back({(*model)(v), static_cast<double>(v)});
    draw_polyline(out, curve, kEdgeColor);
  }

  const Color frame = status_color(status.state);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const bool border = x < kOverlayBorder || y < kOverlayBorder ||
                          x >= out.width() - kOverlayBorder || y >= out.height() - kOverlayBorder;
      if (border) put(out, x, y, frame);
    }
  }
  return out;
}

}  // namespace furrow
