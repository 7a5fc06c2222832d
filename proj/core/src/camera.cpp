#include "furrow/camera.hpp"

#include <cmath>
#include <numbers>

#include "furrow/error.hpp"

namespace furrow {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "camera focal lengths must be positive");
  }
  if (!(height > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "camera height must be positive");
  }
  if (roll != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "only roll = 0 is supported");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "camera image size must be positive");
  }
}

CameraModel camera_defaults() {
  CameraModel cam;
  cam.image_width = 640;
  cam.image_height = 480;
  cam.fx = 337.0;
  cam.fy = 337.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.pitch = -23.0 * std::numbers::pi / 180.0;
  cam.roll = 0.0;
  cam.height = 0.560;
  return cam;
}

}  // namespace furrow
