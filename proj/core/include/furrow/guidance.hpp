#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "furrow/camera.hpp"
#include "furrow/image.hpp"
#include "furrow/matcher.hpp"

namespace furrow {

struct GroundPoint {
  double x = 0.0;  // lateral, meters
  double z = 0.0;  // forward, meters
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

/// Back-projects (u, v) onto the ground plane. Throws kHorizonOrAbove.
GroundPoint pixel_to_ground(const CameraModel& camera, double u, double v);

/// Projects a ground point. Throws kBehindCamera.
PixelPoint ground_to_pixel(const CameraModel& camera, double x, double z);

struct GuidanceConfig {
  double wheel_width = 0.530;  // meters between the edge and each lane line
  double lookahead = 1.5;      // meters
  double warn_threshold = 0.10;
  std::optional<double> wheel_column;  // nullopt = principal point column
  double max_distance = 10.0;          // lane lines are not drawn beyond this

  void validate() const;
  friend bool operator==(const GuidanceConfig&, const GuidanceConfig&) = default;
};

struct LaneLines {
  std::vector<PixelPoint> edge;
  std::vector<PixelPoint> left;   // edge shifted by -wheel_width in ground X
  std::vector<PixelPoint> right;  // edge shifted by +wheel_width in ground X
};

/// Samples the edge curve on every ground-visible row and offsets it
/// laterally on the ground. Throws kHorizonOrAbove if no row qualifies.
LaneLines lane_lines(const FurrowEdgeModel& model, const CameraModel& camera,
                     const GuidanceConfig& cfg);

enum class DepartureState { kOk, kWarnLeft, kWarnRight, kNoEdge };

std::string_view departure_state_name(DepartureState state) noexcept;

struct DepartureStatus {
  DepartureState state = DepartureState::kNoEdge;
  double lateral_offset = 0.0;  // X_wheel - X_edge at the lookahead distance
};

/// Throws kLookaheadNotVisible when the lookahead row is outside the image.
DepartureStatus departure_status(const std::optional<FurrowEdgeModel>& model,
                                 const CameraModel& camera, const GuidanceConfig& cfg);

inline constexpr int kOverlayStroke = 2;
inline constexpr int kOverlayBorder = 6;

/// Draws the edge curve and lane lines and frames the image with a status
/// colour (green OK, red warnings, gray no edge).
RgbImage render_overlay(const RgbImage& rgb, const std::optional<FurrowEdgeModel>& model,
                        const std::optional<LaneLines>& lanes, const DepartureStatus& status);

}  // namespace furrow
