#include "furrow/matcher.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

namespace furrow {

void DetectorConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(starting_depth > 0.0)) fail("starting_depth must be > 0");
  if (band_width <= 0) fail("band_width must be > 0");
  if (band_shift <= 0) fail("band_shift must be > 0");
  if (max_bands && *max_bands <= 0) fail("max_bands must be > 0 or unbounded");
  if (template_size < 4 || template_size % 2 != 0) fail("template_size must be even and >= 4");
  if (!(score_threshold >= -1.0 && score_threshold <= 1.0)) fail("score_threshold must be in [-1, 1]");
  if (!(ransac_threshold > 0.0)) fail("ransac_threshold must be > 0");
  if (ransac_iterations <= 0) fail("ransac_iterations must be > 0");
  if (roi.x_min < 0 || roi.x_min >= roi.x_max || roi.y_min < 0 || roi.y_min >= roi.y_max) {
    fail("roi must be non-empty with non-negative origin");
  }
  if (roi.width() < template_size) fail("roi narrower than the template");
  if (fit_degree != 2) fail("only 2nd degree fits are supported");
  if (!(max_invalid_fraction >= 0.0 && max_invalid_fraction <= 1.0)) {
    fail("max_invalid_fraction must be in [0, 1]");
  }
}

Template::Template(int size, std::vector<double> values) : size_(size), values_(std::move(values)) {
  if (size <= 0 || values_.size() != static_cast<std::size_t>(size) * size) {
    throw Error(ErrorCode::kInvalidArgument, "template data does not match its size");
  }
}

Template make_step_template(int size) {
  if (size < 4 || size % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "step template size must be even and >= 4");
  }
  // +-1 halves already have zero mean; the norm of the raw pattern is `size`.
  std::vector<double> values(static_cast<std::size_t>(size) * size);
  const double level = 1.0 / size;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      values[static_cast<std::size_t>(y) * size + x] = x < size / 2 ? -level : level;
    }
  }
  return Template(size, std::move(values));
}

double ncc_at(const DepthMap& depth, int left, int top, const Template& tmpl,
              double max_invalid_fraction) {
  const int n = tmpl.size();
  const int total = n * n;
  const int max_invalid = static_cast<int>(std::floor(max_invalid_fraction * total + 1e-9));

  int valid = 0;
  double sum_p = 0.0;
  double sum_t = 0.0;
  for (int y = 0; y < n; ++y) {
    const int iy = top + y;
    if (iy < 0 || iy >= depth.height()) continue;
    for (int x = 0; x < n; ++x) {
      const int ix = left + x;
      if (ix < 0 || ix >= depth.width()) continue;
      const double p = depth.at(ix, iy);
      if (!is_valid_depth(p)) continue;
      ++valid;
      sum_p += p;
      sum_t += tmpl.at(x, y);
    }
  }
  if (total - valid > max_invalid || valid == 0) return kNoMatchScore;

  const double mean_p = sum_p / valid;
  const double mean_t = sum_t / valid;
  double spp = 0.0;
  double stt = 0.0;
  double spt = 0.0;
  for (int y = 0; y < n; ++y) {
    const int iy = top + y;
    if (iy < 0 || iy >= depth.height()) continue;
    for (int x = 0; x < n; ++x) {
      const int ix = left + x;
      if (ix < 0 || ix >= depth.width()) continue;
      const double p = depth.at(ix, iy);
      if (!is_valid_depth(p)) continue;
      const double dp = p - mean_p;
      const double dt = tmpl.at(x, y) - mean_t;
      spp += dp * dp;
      stt += dt * dt;
      spt += dp * dt;
    }
  }
  constexpr double kMinVariance = 1e-12;
  if (spp / valid < kMinVariance || stt <= 0.0) return kNoMatchScore;
  return std::clamp(spt / std::sqrt(spp * stt), -1.0, 1.0);
}

double ncc_score(const DepthMap& patch, const Template& tmpl, double max_invalid_fraction) {
  if (patch.width() != tmpl.size() || patch.height() != tmpl.size()) {
    throw Error(ErrorCode::kInvalidArgument, "patch and template sizes differ");
  }
  return ncc_at(patch, 0, 0, tmpl, max_invalid_fraction);
}

namespace {

double median_in_place(std::vector<double>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

void check_roi(const DepthMap& depth, const DetectorConfig& cfg) {
  if (depth.empty()) throw Error(ErrorCode::kInvalidArgument, "empty depth map");
  if (!cfg.roi.fits(depth.width(), depth.height())) {
    throw Error(ErrorCode::kOutOfBounds, "detector ROI does not fit the depth map");
  }
}

std::vector<CandidatePoint> scan_from(const DepthMap& depth, const DetectorConfig& cfg,
                                      const Template& tmpl, int start) {
  const int size = tmpl.size();
  const int half = size / 2;
  const int first_left = cfg.roi.x_min;
  const int last_left = cfg.roi.x_max - size;
  std::vector<double> scores(static_cast<std::size_t>(last_left - first_left + 1));

  std::vector<CandidatePoint> out;
  for (const Band& band : band_layout(start, cfg)) {
    const int top = band.center_row - half;
    for (int left = first_left; left <= last_left; ++left) {
      scores[left - first_left] = ncc_at(depth, left, top, tmpl, cfg.max_invalid_fraction);
    }
    const auto best_it = std::max_element(scores.begin(), scores.end());
    const double best = *best_it;
    if (best <= kNoMatchScore || best < cfg.score_threshold) continue;

    const auto i = static_cast<std::size_t>(best_it - scores.begin());
    double offset = 0.0;
    if (cfg.subpixel && i > 0 && i + 1 < scores.size() && scores[i - 1] > kNoMatchScore &&
        scores[i + 1] > kNoMatchScore) {
      const double denom = scores[i - 1] - 2.0 * best + scores[i + 1];
      if (denom < 0.0) offset = std::clamp(0.5 * (scores[i - 1] - scores[i + 1]) / denom, -0.5, 0.5);
    }
    // The step sits between template columns half - 1 and half.
    const double x = first_left + static_cast<double>(i) + offset + half - 0.5;
    out.push_back({x, static_cast<double>(band.center_row), best, band.index});
  }
  return out;
}

std::size_t distinct_rows(const std::vector<CandidatePoint>& points) {
  std::set<double> ys;
  for (const auto& p : points) ys.insert(p.y);
  return ys.size();
}

struct Parabola {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double operator()(double y) const noexcept { return (a * y + b) * y + c; }
};

// Exact interpolation via divided differences; ys must be distinct.
Parabola interpolate(const CandidatePoint& p1, const CandidatePoint& p2, const CandidatePoint& p3) {
  const double d12 = (p2.x - p1.x) / (p2.y - p1.y);
  const double d23 = (p3.x - p2.x) / (p3.y - p2.y);
  Parabola f;
  f.a = (d23 - d12) / (p3.y - p1.y);
  f.b = d12 - f.a * (p1.y + p2.y);
  f.c = p1.x - (f.a * p1.y + f.b) * p1.y;
  return f;
}

Parabola least_squares(const std::vector<CandidatePoint>& points,
                       const std::vector<std::size_t>& indices) {
  double scale = 0.0;
  for (std::size_t i : indices) scale = std::max(scale, std::abs(points[i].y));
  if (scale == 0.0) scale = 1.0;

  Eigen::MatrixXd design(static_cast<Eigen::Index>(indices.size()), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const double t = points[indices[r]].y / scale;
    design(static_cast<Eigen::Index>(r), 0) = t * t;
    design(static_cast<Eigen::Index>(r), 1) = t;
    design(static_cast<Eigen::Index>(r), 2) = 1.0;
    rhs(static_cast<Eigen::Index>(r)) = points[indices[r]].x;
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef(0) / (scale * scale), coef(1) / scale, coef(2)};
}

FurrowEdgeModel make_model(const Parabola& f, const std::vector<CandidatePoint>& points,
                           double threshold) {
  FurrowEdgeModel model;
  model.a = f.a;
  model.b = f.b;
  model.c = f.c;
  model.candidate_count = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(points[i].x - f(points[i].y)) <= threshold) model.inlier_indices.push_back(i);
  }
  model.inlier_ratio = points.empty() ? 0.0
                                      : static_cast<double>(model.inlier_indices.size()) /
                                            static_cast<double>(points.size());
  return model;
}

}  // namespace

int start_row(const DepthMap& depth, const DetectorConfig& cfg) {
  check_roi(depth, cfg);
  std::vector<double> row_values;
  row_values.reserve(static_cast<std::size_t>(cfg.roi.width()));
  for (int y = cfg.roi.y_max - 1; y >= cfg.roi.y_min; --y) {
    row_values.clear();
    for (int x = cfg.roi.x_min; x < cfg.roi.x_max; ++x) {
      const double d = depth.at(x, y);
      if (is_valid_depth(d)) row_values.push_back(d);
    }
    if (row_values.empty()) continue;
    if (median_in_place(row_values) >= cfg.starting_depth) return y;
  }
  throw Error(ErrorCode::kNoStartRow, "no ROI row reaches the starting depth");
}

std::vector<Band> band_layout(int start, const DetectorConfig& cfg) {
  std::vector<Band> bands;
  const int half = cfg.template_size / 2;
  for (int k = 0;; ++k) {
    if (cfg.max_bands && k >= *cfg.max_bands) break;
    const int center = start - k * cfg.band_shift;
    if (center - half < cfg.roi.y_min) break;
    const int top = center - cfg.band_width / 2;
    bands.push_back({k, center, top, top + cfg.band_width});
  }
  return bands;
}

std::vector<CandidatePoint> scan_bands(const DepthMap& depth, const DetectorConfig& cfg,
                                       const Template& tmpl) {
  cfg.validate();
  return scan_from(depth, cfg, tmpl, start_row(depth, cfg));
}

FurrowEdgeModel fit_parabola_least_squares(const std::vector<CandidatePoint>& points) {
  if (distinct_rows(points) < 3) {
    throw Error(ErrorCode::kInsufficientPoints, "need at least 3 points with distinct rows");
  }
  std::vector<std::size_t> all(points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return make_model(least_squares(points, all), points, std::numeric_limits<double>::infinity());
}

FurrowEdgeModel fit_parabola_ransac(const std::vector<CandidatePoint>& points,
                                    const DetectorConfig& cfg) {
  if (cfg.fit_degree != 2) throw Error(ErrorCode::kInvalidArgument, "only 2nd degree fits");
  if (distinct_rows(points) < 3) {
    throw Error(ErrorCode::kInsufficientPoints,
                "RANSAC needs at least 3 points with distinct rows, got " +
                    std::to_string(points.size()) + " points");
  }

  constexpr int kMaxDraws = 100;
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);

  bool found = false;
  std::size_t best_count = 0;
  double best_residual = 0.0;
  Parabola best;
  for (int it = 0; it < cfg.ransac_iterations; ++it) {
    std::size_t i = 0, j = 0, k = 0;
    bool ok = false;
    for (int draw = 0; draw < kMaxDraws && !ok; ++draw) {
      i = pick(rng);
      j = pick(rng);
      k = pick(rng);
      ok = points[i].y != points[j].y && points[j].y != points[k].y && points[i].y != points[k].y;
    }
    if (!ok) continue;

    const Parabola f = interpolate(points[i], points[j], points[k]);
    if (!std::isfinite(f.a) || !std::isfinite(f.b) || !std::isfinite(f.c)) continue;
    std::size_t count = 0;
    double residual = 0.0;
    for (const auto& p : points) {
      const double r = std::abs(p.x - f(p.y));
      if (r <= cfg.ransac_threshold) {
        ++count;
        residual += r;
      }
    }
    if (!found || count > best_count || (count == best_count && residual < best_residual)) {
      found = true;
      best_count = count;
      best_residual = residual;
      best = f;
    }
  }
  if (!found) throw Error(ErrorCode::kAllDegenerate, "every RANSAC sample was degenerate");

  std::vector<std::size_t> consensus;
  for (std::size_t n = 0; n < points.size(); ++n) {
    if (std::abs(points[n].x - best(points[n].y)) <= cfg.ransac_threshold) consensus.push_back(n);
  }
  return make_model(least_squares(points, consensus), points, cfg.ransac_threshold);
}

Detection detect_furrow_detailed(const DepthMap& depth, const DetectorConfig& cfg) {
  cfg.validate();
  const Template tmpl = make_step_template(cfg.template_size);
  Detection det;
  det.start_row = start_row(depth, cfg);
  det.candidates = scan_from(depth, cfg, tmpl, det.start_row);
  det.model = fit_parabola_ransac(det.candidates, cfg);
  return det;
}

FurrowEdgeModel detect_furrow(const DepthMap& depth, const DetectorConfig& cfg) {
  return detect_furrow_detailed(depth, cfg).model;
}

}  // namespace furrow
