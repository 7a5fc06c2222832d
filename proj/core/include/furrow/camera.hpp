#pragma once

namespace furrow {

/// Pinhole camera above a flat ground plane. World frame: X lateral (right),
/// Y up, Z forward along the ground; the camera sits at (0, height, 0).
struct CameraModel {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double pitch = 0.0;  // radians, negative tilts the optical axis down
  double roll = 0.0;   // radians, only 0 is supported
  double height = 0.0; // meters above the ground plane
  int image_width = 0;
  int image_height = 0;

  /// Throws kInvalidArgument when intrinsics, height or roll are out of contract.
  void validate() const;

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

/// RealSense D435 style mount: 640x480, pitch -23 deg, roll 0, 0.560 m above
/// ground. Intrinsics fx = fy = 337 come from the 87 deg horizontal depth FOV,
/// principal point at the image center.
CameraModel camera_defaults();

}  // namespace furrow
