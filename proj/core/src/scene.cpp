#include "furrow/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "trace.hpp"

namespace furrow {
namespace {

constexpr double kNoHit = std::numeric_limits<double>::infinity();

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
};

// World-frame direction of the ray through pixel (u, v); not normalized, its
// camera-frame z component is 1.
Vec3 ray_direction(const CameraModel& cam, double u, double v) noexcept {
  const double dx = (u - cam.cx) / cam.fx;
  const double dy = (v - cam.cy) / cam.fy;
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  return {dx, -dy * cp + sp, dy * sp + cp};
}

enum class Surface { kNone, kLand, kWall, kFloor, kPile };

struct Hit {
  double t = kNoHit;
  Surface surface = Surface::kNone;
};

// Smallest root of a t^2 + b t + c = 0 inside (lo, hi], or kNoHit.
double first_root_in(double a, double b, double c, double lo, double hi) noexcept {
  double roots[2] = {kNoHit, kNoHit};
  if (std::abs(a) < 1e-15) {
    if (std::abs(b) > 0.0) roots[0] = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return kNoHit;
    const double s = std::sqrt(disc);
    // Numerically stable pair.
    const double q = -0.5 * (b + std::copysign(s, b));
    roots[0] = q / a;
    roots[1] = q != 0.0 ? c / q : kNoHit;
  }
  double best = kNoHit;
  for (double r : roots) {
    if (r > lo && r <= hi && r < best) best = r;
  }
  return best;
}

Hit terrain_hit(const CameraModel& cam, const SceneSpec& scene, const Vec3& d) noexcept {
  if (d.y >= 0.0) return {};
  const double t0 = cam.height / -d.y;
  const double x0 = t0 * d.x;
  const double z0 = t0 * d.z;
  if (x0 <= scene.edge_x(z0)) return {t0, Surface::kLand};

  const double t1 = (cam.height + scene.trench_depth) / -d.y;
  // g(t) = X(t) - X_edge(Z(t)); the ray is on the trench side at t0.
  const double a = -scene.edge_alpha * d.z * d.z;
  const double b = d.x - scene.edge_beta * d.z;
  const double c = -scene.edge_gamma;
  const double wall = first_root_in(a, b, c, t0, t1);
  if (wall < t1) return {wall, Surface::kWall};
  return {t1, Surface::kFloor};
}

Hit pile_hit(const CameraModel& cam, const SoilPile& pile, const Vec3& d) noexcept {
  if (!(pile.radius > 0.0) || !(pile.height > 0.0)) return {};
  const double k = pile.height / (pile.radius * pile.radius);
  const double a = k * (d.x * d.x + d.z * d.z);
  const double b = d.y - 2.0 * k * (d.x * pile.center_x + d.z * pile.center_z);
  const double c = cam.height - pile.height +
                   k * (pile.center_x * pile.center_x + pile.center_z * pile.center_z);
  const double t = first_root_in(a, b, c, 0.0, kNoHit);
  if (t == kNoHit) return {};
  const double rx = t * d.x - pile.center_x;
  const double rz = t * d.z - pile.center_z;
  if (rx * rx + rz * rz > pile.radius * pile.radius) return {};
  return {t, Surface::kPile};
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t bits = splitmix64(seed ^ splitmix64(counter));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;  // (0, 1)
}

// Standard normal draw tied to (seed, pixel) only.
double pixel_normal(std::uint64_t seed, std::uint64_t pixel) noexcept {
  const double u1 = unit_uniform(seed, 2 * pixel);
  const double u2 = unit_uniform(seed, 2 * pixel + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void soil_color(int albedo, std::uint8_t* px) noexcept {
  px[0] = static_cast<std::uint8_t>(std::clamp(albedo, 0, 255));
  px[1] = static_cast<std::uint8_t>(std::clamp(static_cast<int>(albedo * 0.8), 0, 255));
  px[2] = static_cast<std::uint8_t>(std::clamp(static_cast<int>(albedo * 0.6), 0, 255));
}

void paint(const SceneSpec& scene, Surface surface, std::uint8_t* px) noexcept {
  switch (surface) {
    case Surface::kNone:
      px[0] = 170;
      px[1] = 200;
      px[2] = 230;
      break;
    case Surface::kLand: soil_color(scene.albedo_left, px); break;
    case Surface::kFloor: soil_color(scene.albedo_right, px); break;
    case Surface::kWall: soil_color(static_cast<int>(scene.albedo_right * 0.7), px); break;
    case Surface::kPile: soil_color((scene.albedo_left + scene.albedo_right) / 2, px); break;
  }
}

}  // namespace

void SceneSpec::validate() const {
  if (!(trench_depth >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "trench_depth must be >= 0");
  if (!(max_range > 0.0) || max_range > kSensorMaxRange) {
    throw Error(ErrorCode::kInvalidArgument, "max_range must be in (0, 10] m");
  }
  if (albedo_left < 0 || albedo_left > 255 || albedo_right < 0 || albedo_right > 255) {
    throw Error(ErrorCode::kInvalidArgument, "albedo must be in [0, 255]");
  }
}

void CorruptionSpec::validate() const {
  if (!(noise_sigma_coeff >= 0.0) || dropout_blob_count < 0 || !(dropout_blob_radius >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "corruption magnitudes must be >= 0");
  }
  if (pile && (!(pile->radius >= 0.0) || !(pile->height >= 0.0))) {
    throw Error(ErrorCode::kInvalidArgument, "pile radius and height must be >= 0");
  }
}

std::vector<EdgeSample> ground_truth_edge(const CameraModel& camera, const SceneSpec& scene) {
  camera.validate();
  scene.validate();
  std::vector<EdgeSample> out;
  for (int v = 0; v < camera.image_height; ++v) {
    // Ground Z along a row does not depend on u when roll is zero.
    const Vec3 d0 = ray_direction(camera, camera.cx, v);
    if (d0.y >= 0.0) continue;
    const double t = camera.height / -d0.y;
    const double x = scene.edge_x(t * d0.z);
    const double u = camera.cx + camera.fx * x / t;
    const double range = t * ray_direction(camera, u, v).norm();
    if (range > scene.max_range) continue;
    out.push_back({v, u, range});
  }
  return out;
}

RenderedScene render(const CameraModel& camera, const SceneSpec& scene,
                     const CorruptionSpec& corruption) {
  camera.validate();
  scene.validate();
  corruption.validate();
  const int w = camera.image_width;
  const int h = camera.image_height;
  if (ray_direction(camera, camera.cx, h - 1).y >= 0.0) {
    throw Error(ErrorCode::kDegenerateCamera, "camera does not see the ground plane");
  }

  RenderedScene out{DepthMap(w, h), EdgeMask(w, h), RgbImage(w, h)};
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Vec3 d = ray_direction(camera, u, v);
      Hit hit = terrain_hit(camera, scene, d);
      if (corruption.pile) {
        const Hit p = pile_hit(camera, *corruption.pile, d);
        if (p.t < hit.t) hit = p;
      }
      paint(scene, hit.surface, &out.rgb.at(u, v, 0));
      if (hit.surface == Surface::kNone) continue;
      const double range = hit.t * d.norm();
      if (range <= scene.max_range) out.depth.at(u, v) = range;
    }
  }

  std::vector<detail::RowPoint> trace;
  for (const auto& s : ground_truth_edge(camera, scene)) trace.push_back({s.row, s.column});
  detail::draw_row_trace(out.edge_mask, trace);

  if (corruption.noise_sigma_coeff > 0.0) {
    auto depth = out.depth.data();
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if (!is_valid_depth(depth[i])) continue;
      const double sigma = corruption.noise_sigma_coeff * depth[i] * depth[i];
      depth[i] = std::max(depth[i] + sigma * pixel_normal(corruption.rng_seed, i), 1e-3);
    }
  }

  if (corruption.dropout_blob_count > 0 && corruption.dropout_blob_radius > 0.0) {
    std::mt19937_64 rng(splitmix64(corruption.rng_seed ^ 0x6a09e667f3bcc909ULL));
    std::uniform_real_distribution<double> ux(0.0, w);
    std::uniform_real_distribution<double> uy(0.0, h);
    const double r = corruption.dropout_blob_radius;
    for (int b = 0; b < corruption.dropout_blob_count; ++b) {
      const double bx = ux(rng);
      const double by = uy(rng);
      const int y0 = std::max(0, static_cast<int>(std::floor(by - r)));
      const int y1 = std::min(h - 1, static_cast<int>(std::ceil(by + r)));
      const int x0 = std::max(0, static_cast<int>(std::floor(bx - r)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(bx + r)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if ((x - bx) * (x - bx) + (y - by) * (y - by) <= r * r) out.depth.at(x, y) = kInvalidDepth;
        }
      }
    }
  }
  return out;
}

SceneSpec random_scene(std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  SceneSpec s;
  s.edge_alpha = in(-0.01, 0.01);
  s.edge_beta = in(-0.05, 0.05);
  s.edge_gamma = in(0.2, 0.4);
  s.trench_depth = in(0.1, 0.3);
  s.albedo_left = static_cast<int>(in(60.0, 110.0));
  s.albedo_right = static_cast<int>(in(140.0, 200.0));
  return s;
}

int dropout_blobs_for_fraction(const CameraModel& camera, double fraction, double radius) {
  if (!(fraction >= 0.0 && fraction < 1.0) || !(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropout fraction must be in [0, 1), radius > 0");
  }
  const double area = static_cast<double>(camera.image_width) * camera.image_height;
  const double blob = std::numbers::pi * radius * radius;
  return static_cast<int>(std::lround(-std::log(1.0 - fraction) * area / blob));
}

}  // namespace furrow
