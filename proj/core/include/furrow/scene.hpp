#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "furrow/camera.hpp"
#include "furrow/image.hpp"

namespace furrow {

/// Flat field with a vertical-walled trench on the +X side of the edge curve
/// X_edge(Z) = alpha Z^2 + beta Z + gamma (ground meters).
struct SceneSpec {
  double edge_alpha = 0.0;
  double edge_beta = 0.0;
  double edge_gamma = 0.3;
  double trench_depth = 0.2;
  int albedo_left = 90;
  int albedo_right = 150;
  double max_range = 10.0;

  void validate() const;
  double edge_x(double z) const noexcept { return (edge_alpha * z + edge_beta) * z + edge_gamma; }
  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// Paraboloid mound of soil: height * (1 - r^2 / radius^2) above the ground.
struct SoilPile {
  double center_x = 0.0;
  double center_z = 0.0;
  double radius = 0.0;
  double height = 0.0;

  friend bool operator==(const SoilPile&, const SoilPile&) = default;
};

struct CorruptionSpec {
  double noise_sigma_coeff = 0.0;  // depth noise sigma = coeff * range^2
  int dropout_blob_count = 0;
  double dropout_blob_radius = 0.0;  // pixels
  std::optional<SoilPile> pile;
  std::uint64_t rng_seed = 0;

  void validate() const;
  friend bool operator==(const CorruptionSpec&, const CorruptionSpec&) = default;
};

struct RenderedScene {
  DepthMap depth;
  EdgeMask edge_mask;
  RgbImage rgb;
};

/// Analytic image position of the edge on one row.
struct EdgeSample {
  int row = 0;
  double column = 0.0;
  double range = 0.0;  // camera-to-edge distance, meters
};

/// Ray-casts the scene. Depth is the Euclidean ray length, invalid beyond
/// max_range or where no surface is hit. Throws kDegenerateCamera when no
/// image row sees the ground.
RenderedScene render(const CameraModel& camera, const SceneSpec& scene,
                     const CorruptionSpec& corruption = {});

/// Edge column per ground-seeing row, limited to max_range; rows ascend.
std::vector<EdgeSample> ground_truth_edge(const CameraModel& camera, const SceneSpec& scene);

/// Seeded scene with a gently curved edge: alpha in [-0.01, 0.01],
/// beta in [-0.05, 0.05], gamma in [0.2, 0.4] m, trench 0.1 to 0.3 m and
/// distinct soil albedos.
SceneSpec random_scene(std::uint64_t seed);

/// Blob count that drops out about `fraction` of the frame for the given radius
/// (Poisson coverage, overlaps accounted for).
int dropout_blobs_for_fraction(const CameraModel& camera, double fraction, double radius);

}  // namespace furrow
