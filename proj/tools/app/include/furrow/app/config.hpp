#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "furrow/camera.hpp"
#include "furrow/classical.hpp"
#include "furrow/datakit.hpp"
#include "furrow/guidance.hpp"
#include "furrow/matcher.hpp"
#include "furrow/scene.hpp"

namespace furrow::app {

struct IoConfig {
  double depth_scale = 0.001;
  std::string out_dir = "out";

  friend bool operator==(const IoConfig&, const IoConfig&) = default;
};

/// Effective settings of one CLI run.
struct AppConfig {
  DetectorConfig detector;
  ClassicalConfig classical;
  CameraModel camera = camera_defaults();
  GuidanceConfig guidance;
  AugmentSpec augment;
  QualityGate quality;
  SceneSpec scene;
  CorruptionSpec corruption;
  IoConfig io;

  friend bool operator==(const AppConfig&, const AppConfig&) = default;
};

/// Parses INI-style text ("[section]" headers, "key = value" lines, ';' or
/// '#' comments) on top of the defaults. Unknown sections or keys throw
/// Error(kConfig).
AppConfig parse_config(std::string_view text);
AppConfig load_config(const std::filesystem::path& path);

/// Every key with its current value, in a form parse_config reads back
/// to an identical AppConfig.
std::string dump_config(const AppConfig& cfg);

}  // namespace furrow::app
