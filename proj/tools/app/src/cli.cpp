#include "furrow/app/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/logger.h>
#include <spdlog/sinks/ostream_sink.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "furrow/app/config.hpp"
#include "furrow/app/parallel.hpp"
#include "furrow/app/records.hpp"
#include "furrow/classical.hpp"
#include "furrow/datakit.hpp"
#include "furrow/error.hpp"
#include "furrow/guidance.hpp"
#include "furrow/image_io.hpp"
#include "furrow/manifest.hpp"
#include "furrow/matcher.hpp"
#include "furrow/metrics.hpp"
#include "furrow/scene.hpp"

namespace furrow::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::string config;
  std::optional<std::string> out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> depth_scale;
  bool dump_defaults = false;
};

// Raised for bad flags or inputs detected after parsing; maps to exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrameResult {
  std::string frame;
  bool ok = false;
  bool rejected = false;
  std::string error;
  std::string message;
  std::vector<std::string> lines;
  std::vector<ManifestRecord> records;
  int skipped_negatives = 0;
};

class Context {
 public:
  Context(std::ostream& out, std::ostream& err)
      : out_(out),
        log_("furrow", std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true)) {
    log_.set_pattern("[%l] %v");
  }

  std::ostream& out() { return out_; }
  spdlog::logger& log() { return log_; }

 private:
  std::ostream& out_;
  spdlog::logger log_;
};

AppConfig effective_config(const GlobalOptions& g) {
  AppConfig cfg = g.config.empty() ? AppConfig{} : load_config(g.config);
  if (g.out_dir) cfg.io.out_dir = *g.out_dir;
  if (g.seed) {
    cfg.detector.rng_seed = *g.seed;
    cfg.augment.rng_seed = *g.seed;
    cfg.corruption.rng_seed = *g.seed;
  }
  if (g.depth_scale) cfg.io.depth_scale = *g.depth_scale;
  if (!(cfg.io.depth_scale > 0.0)) throw Error(ErrorCode::kConfig, "io.depth_scale must be positive");
  try {
    cfg.detector.validate();
    cfg.camera.validate();
    cfg.augment.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  return cfg;
}

bool has_extension(const fs::path& p, const std::vector<std::string>& exts) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::find(exts.begin(), exts.end(), ext) != exts.end();
}

// Files are taken as given; directories contribute their image files. The
// result is ordered by file name.
std::vector<fs::path> collect_inputs(const std::vector<std::string>& args) {
  static const std::vector<std::string> kImageExts{".png", ".pgm", ".ppm"};
  std::vector<fs::path> files;
  for (const auto& a : args) {
    const fs::path p(a);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && has_extension(entry.path(), kImageExts)) {
          files.push_back(entry.path());
        }
      }
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw UsageError("input not found: " + a);
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& x, const fs::path& y) {
    return std::pair(x.filename().string(), x.string()) < std::pair(y.filename().string(), y.string());
  });
  if (files.empty()) throw UsageError("no input frames");
  return files;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

// Runs fn for each input, catching per-frame failures.
template <typename Fn>
std::vector<FrameResult> for_each_frame(const std::vector<fs::path>& inputs, int jobs, Fn fn) {
  std::vector<FrameResult> results(inputs.size());
  parallel_for(inputs.size(), jobs, [&](std::size_t i) {
    FrameResult& r = results[i];
    r.frame = inputs[i].filename().string();
    try {
      fn(i, inputs[i], r);
      r.ok = !r.rejected;
    } catch (const Error& e) {
      r.error = std::string(error_code_name(e.code()));
      r.message = e.what();
    } catch (const std::exception& e) {
      r.error = "exception";
      r.message = e.what();
    }
  });
  return results;
}

// Logs failures, prints a summary line, optionally writes summary.json, and
// returns the exit code: processing error only when no frame succeeded.
int finish(Context& ctx, const std::string& command, const std::vector<FrameResult>& results,
           const std::optional<fs::path>& summary_dir, json extra = json::object()) {
  json failed = json::array();
  json rejected = json::array();
  std::size_t ok = 0;
  for (const auto& r : results) {
    if (r.ok) {
      ++ok;
    } else if (r.rejected) {
      ctx.log().info("{}: rejected by quality gate", r.frame);
      rejected.push_back(r.frame);
    } else {
      ctx.log().error("{}: {} ({})", r.frame, r.message, r.error);
      failed.push_back(json{{"frame", r.frame}, {"error", r.error}, {"message", r.message}});
    }
  }
  json summary{{"command", command},
               {"processed", results.size()},
               {"succeeded", ok},
               {"failed", failed},
               {"rejected", rejected}};
  summary.update(extra);
  ctx.log().info("{}: {}/{} frames ok, {} failed, {} rejected", command, ok, results.size(),
                 failed.size(), rejected.size());
  if (summary_dir) {
    fs::create_directories(*summary_dir);
    std::ofstream(*summary_dir / "summary.json") << summary.dump(2) << '\n';
  }
  return ok > 0 ? kExitOk : kExitProcessing;
}

void emit_lines(Context& ctx, const std::vector<FrameResult>& results,
                const std::optional<std::string>& output) {
  std::ofstream file;
  if (output) {
    const fs::path p(*output);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    file.open(p);
    if (!file) throw Error(ErrorCode::kIo, "cannot write " + *output);
  }
  std::ostream& os = output ? static_cast<std::ostream&>(file) : ctx.out();
  for (const auto& r : results) {
    for (const auto& line : r.lines) os << line << '\n';
  }
}

// detect-tm ------------------------------------------------------------------

struct DetectTmOptions {
  std::vector<std::string> inputs;
  bool masks = false;
  std::optional<std::string> candidates;
  std::optional<std::string> output;
};

int detect_tm(Context& ctx, const AppConfig& cfg, const GlobalOptions& g, const DetectTmOptions& o) {
  const auto inputs = collect_inputs(o.inputs);
  const fs::path out_dir(cfg.io.out_dir);
  if (o.masks) fs::create_directories(out_dir / "masks");
  std::vector<std::vector<CandidatePoint>> candidates(inputs.size());

  auto results = for_each_frame(inputs, g.jobs, [&](std::size_t i, const fs::path& path, FrameResult& r) {
    const DepthMap depth = load_depth(path, cfg.io.depth_scale);
    Detection det = detect_furrow_detailed(depth, cfg.detector);
    r.lines.push_back(model_record(r.frame, det.model).dump());
    if (o.masks) {
      try {
        save_mask(rasterize_label(det.model, depth.width(), depth.height()),
                  out_dir / "masks" / (path.stem().string() + ".png"));
      } catch (const Error& e) {
        ctx.log().warn("{}: no mask written: {}", r.frame, e.what());
      }
    }
    candidates[i] = std::move(det.candidates);
  });

  emit_lines(ctx, results, o.output);
  if (o.candidates) {
    const fs::path p(*o.candidates);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream csv(p);
    if (!csv) throw Error(ErrorCode::kIo, "cannot write " + *o.candidates);
    csv << "frame,band,x,y,score\n";
    csv.precision(17);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      for (const auto& c : candidates[i]) {
        csv << inputs[i].filename().string() << ',' << c.band_index << ',' << c.x << ',' << c.y
            << ',' << c.score << '\n';
      }
    }
  }
  return finish(ctx, "detect-tm", results, o.masks ? std::optional(out_dir) : std::nullopt);
}

// detect-canny ---------------------------------------------------------------

int detect_canny(Context& ctx, const AppConfig& cfg, const GlobalOptions& g,
                 const std::vector<std::string>& args) {
  const auto inputs = collect_inputs(args);
  const fs::path out_dir(cfg.io.out_dir);
  fs::create_directories(out_dir);
  auto results = for_each_frame(inputs, g.jobs, [&](std::size_t, const fs::path& path, FrameResult& r) {
    const EdgeMask mask = otsu_canny_pipeline(load_rgb(path), cfg.classical);
    const fs::path dest = out_dir / (path.stem().string() + ".png");
    save_mask(mask, dest);
    const auto edges = std::count(mask.data().begin(), mask.data().end(), std::uint8_t{1});
    r.lines.push_back(json{{"frame", r.frame}, {"mask", dest.string()}, {"edge_pixels", edges}}.dump());
  });
  emit_lines(ctx, results, std::nullopt);
  return finish(ctx, "detect-canny", results, out_dir);
}

// synth ----------------------------------------------------------------------

struct SynthOptions {
  int count = 1;
  int frames_per_capture = 1;
  bool randomize = false;
  std::optional<double> dropout;
  std::string prefix = "synth";
};

json scene_json(const SceneSpec& s) {
  return json{{"edge_alpha", s.edge_alpha},     {"edge_beta", s.edge_beta},
              {"edge_gamma", s.edge_gamma},     {"trench_depth", s.trench_depth},
              {"albedo_left", s.albedo_left},   {"albedo_right", s.albedo_right},
              {"max_range", s.max_range}};
}

json camera_json(const CameraModel& c) {
  return json{{"fx", c.fx},         {"fy", c.fy},         {"cx", c.cx},
              {"cy", c.cy},         {"pitch", c.pitch},   {"roll", c.roll},
              {"height", c.height}, {"image_width", c.image_width},
              {"image_height", c.image_height}};
}

json corruption_json(const CorruptionSpec& c) {
  json j{{"noise_sigma_coeff", c.noise_sigma_coeff},
         {"dropout_blob_count", c.dropout_blob_count},
         {"dropout_blob_radius", c.dropout_blob_radius},
         {"rng_seed", c.rng_seed},
         {"pile", nullptr}};
  if (c.pile) {
    j["pile"] = json{{"center_x", c.pile->center_x},
                     {"center_z", c.pile->center_z},
                     {"radius", c.pile->radius},
                     {"height", c.pile->height}};
  }
  return j;
}

int synth(Context& ctx, const AppConfig& cfg, const GlobalOptions& g, const SynthOptions& o) {
  if (o.count < 1) throw UsageError("--count must be at least 1");
  if (o.frames_per_capture < 1) throw UsageError("--frames-per-capture must be at least 1");
  if (o.dropout && !(*o.dropout >= 0.0 && *o.dropout < 1.0)) {
    throw UsageError("--dropout must be in [0, 1)");
  }
  const fs::path out_dir(cfg.io.out_dir);
  for (const char* sub : {"depth", "mask", "rgb", "meta"}) fs::create_directories(out_dir / sub);

  std::vector<fs::path> names;
  for (int i = 0; i < o.count; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s-c%03d_%04d.png", o.prefix.c_str(), i / o.frames_per_capture, i);
    names.emplace_back(buf);
  }

  auto results = for_each_frame(names, g.jobs, [&](std::size_t, const fs::path& name, FrameResult& r) {
    const int index = std::stoi(name.stem().string().substr(name.stem().string().rfind('_') + 1));
    const int capture = index / o.frames_per_capture;
    const SceneSpec scene =
        o.randomize ? random_scene(cfg.corruption.rng_seed + static_cast<std::uint64_t>(capture))
                    : cfg.scene;
    CorruptionSpec corruption = cfg.corruption;
    corruption.rng_seed = cfg.corruption.rng_seed + static_cast<std::uint64_t>(index);
    if (o.dropout) {
      if (corruption.dropout_blob_radius <= 0.0) corruption.dropout_blob_radius = 8.0;
      corruption.dropout_blob_count =
          dropout_blobs_for_fraction(cfg.camera, *o.dropout, corruption.dropout_blob_radius);
    }
    const RenderedScene rendered = render(cfg.camera, scene, corruption);
    save_depth(rendered.depth, out_dir / "depth" / name, cfg.io.depth_scale);
    save_mask(rendered.edge_mask, out_dir / "mask" / name);
    save_rgb(rendered.rgb, out_dir / "rgb" / name);

    json truth = json::array();
    for (const auto& s : ground_truth_edge(cfg.camera, scene)) {
      truth.push_back(json{{"row", s.row}, {"column", s.column}, {"range", s.range}});
    }
    const json meta{{"frame", name.string()},
                    {"capture", capture},
                    {"scene", scene_json(scene)},
                    {"camera", camera_json(cfg.camera)},
                    {"corruption", corruption_json(corruption)},
                    {"depth_scale", cfg.io.depth_scale},
                    {"ground_truth", truth}};
    std::ofstream(out_dir / "meta" / (name.stem().string() + ".json")) << meta.dump(2) << '\n';
    r.lines.push_back(json{{"frame", name.string()},
                           {"depth", (out_dir / "depth" / name).string()},
                           {"mask", (out_dir / "mask" / name).string()},
                           {"rgb", (out_dir / "rgb" / name).string()}}
                          .dump());
  });
  emit_lines(ctx, results, std::nullopt);
  return finish(ctx, "synth", results, out_dir);
}

// annotate -------------------------------------------------------------------

struct AnnotateOptions {
  std::vector<std::string> inputs;
  std::optional<std::string> split;
  std::string manifest = "manifest.tsv";
};

int annotate(Context& ctx, const AppConfig& cfg, const GlobalOptions& g, const AnnotateOptions& o) {
  std::optional<Split> forced;
  if (o.split) {
    try {
      forced = parse_split(*o.split);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  const auto inputs = collect_inputs(o.inputs);
  const fs::path out_dir(cfg.io.out_dir);
  fs::create_directories(out_dir / "masks");

  auto results = for_each_frame(inputs, g.jobs, [&](std::size_t, const fs::path& path, FrameResult& r) {
    const DepthMap depth = load_depth(path, cfg.io.depth_scale);
    const FurrowEdgeModel model = detect_furrow(depth, cfg.detector);
    if (!quality_filter(model, cfg.quality)) {
      r.rejected = true;
      return;
    }
    const fs::path mask_path = out_dir / "masks" / (path.stem().string() + ".png");
    save_mask(rasterize_label(model, depth.width(), depth.height()), mask_path);
    ManifestRecord rec;
    rec.image_path = fs::absolute(path).lexically_normal().string();
    rec.mask_path = fs::absolute(mask_path).lexically_normal().string();
    rec.has_edge = true;
    rec.provenance = capture_id_from_filename(path) + ":" + path.stem().string();
    r.records.push_back(std::move(rec));
    r.lines.push_back(model_record(r.frame, model).dump());
  });

  std::set<std::string> captures;
  for (const auto& r : results) {
    for (const auto& rec : r.records) captures.insert(capture_of(rec));
  }
  const auto splits = assign_splits({captures.begin(), captures.end()}, {10.0, 2.0, 2.0},
                                    cfg.augment.rng_seed);
  DatasetManifest manifest;
  for (const auto& r : results) {
    for (auto rec : r.records) {
      rec.split = forced ? *forced : splits.at(capture_of(rec));
      manifest.records.push_back(std::move(rec));
    }
  }
  write_manifest(manifest, out_dir / o.manifest);
  emit_lines(ctx, results, std::nullopt);
  return finish(ctx, "annotate", results, out_dir,
                json{{"manifest", (out_dir / o.manifest).string()}, {"records", manifest.records.size()}});
}

// augment --------------------------------------------------------------------

struct AugmentOptions {
  std::string manifest;
  std::string kind = "depth";
  std::string output_manifest = "manifest.tsv";
};

template <typename Image, typename Load, typename Save>
void augment_record(const ManifestRecord& rec, const fs::path& base, const AppConfig& cfg,
                    const fs::path& out_dir, Load load, Save save, FrameResult& r) {
  const Image img = load(resolve(base, rec.image_path));
  const EdgeMask mask = load_mask(resolve(base, rec.mask_path));
  const std::string stem = fs::path(rec.image_path).stem().string();
  const std::string capture = capture_of(rec);

  auto emit = [&](const Image& out_img, const EdgeMask& out_mask, bool has_edge,
                  const std::string& name) {
    const fs::path image_path = out_dir / "images" / (name + ".png");
    const fs::path mask_path = out_dir / "masks" / (name + ".png");
    save(out_img, image_path);
    save_mask(out_mask, mask_path);
    ManifestRecord out;
    out.image_path = fs::absolute(image_path).lexically_normal().string();
    out.mask_path = fs::absolute(mask_path).lexically_normal().string();
    out.split = rec.split;
    out.has_edge = has_edge;
    out.provenance = capture + ":" + name;
    r.records.push_back(std::move(out));
  };

  if (rec.split == Split::kTrain) {
    AugmentSpec spec = cfg.augment;
    spec.rng_seed = cfg.augment.rng_seed ^ fnv1a(stem);
    AugmentResult<Image> res = augment(img, mask, spec);
    r.skipped_negatives = res.skipped_negatives;
    for (std::size_t k = 0; k < res.samples.size(); ++k) {
      const auto& s = res.samples[k];
      emit(s.image, s.mask, s.has_edge, stem + "_aug" + std::to_string(k));
    }
  } else {
    const Roi window = augment_crop_window(mask, cfg.augment.crop_size);
    const EdgeMask cropped = crop(mask, window);
    const bool has_edge = std::find(cropped.data().begin(), cropped.data().end(), std::uint8_t{1}) !=
                          cropped.data().end();
    emit(crop(img, window), cropped, has_edge, stem + "_crop");
  }
}

int augment_cmd(Context& ctx, const AppConfig& cfg, const GlobalOptions& g, const AugmentOptions& o) {
  if (o.kind != "depth" && o.kind != "rgb") throw UsageError("--input-kind must be depth or rgb");
  const fs::path manifest_path(o.manifest);
  const DatasetManifest in = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  const fs::path out_dir(cfg.io.out_dir);
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "masks");

  std::vector<fs::path> frames;
  for (const auto& rec : in.records) frames.emplace_back(rec.image_path);
  if (frames.empty()) throw Error(ErrorCode::kEmptyDataset, "manifest has no records");

  auto results = for_each_frame(frames, g.jobs, [&](std::size_t i, const fs::path&, FrameResult& r) {
    const ManifestRecord& rec = in.records[i];
    if (o.kind == "depth") {
      augment_record<DepthMap>(
          rec, base, cfg, out_dir, [&](const fs::path& p) { return load_depth(p, cfg.io.depth_scale); },
          [&](const DepthMap& d, const fs::path& p) { save_depth(d, p, cfg.io.depth_scale); }, r);
    } else {
      augment_record<RgbImage>(
          rec, base, cfg, out_dir, [](const fs::path& p) { return load_rgb(p); },
          [](const RgbImage& img, const fs::path& p) { save_rgb(img, p); }, r);
    }
  });

  DatasetManifest out;
  int skipped = 0;
  std::size_t negatives = 0;
  for (const auto& r : results) {
    skipped += r.skipped_negatives;
    for (const auto& rec : r.records) {
      negatives += rec.has_edge ? 0 : 1;
      out.records.push_back(rec);
    }
  }
  write_manifest(out, out_dir / o.output_manifest);
  return finish(ctx, "augment", results, out_dir,
                json{{"manifest", (out_dir / o.output_manifest).string()},
                     {"records", out.records.size()},
                     {"negatives", negatives},
                     {"skipped_negatives", skipped}});
}

// overlay --------------------------------------------------------------------

struct OverlayOptions {
  std::string rgb;
  std::optional<std::string> model;
  std::optional<std::string> depth;
  std::optional<std::string> output;
};

std::optional<FurrowEdgeModel> model_for_frame(const fs::path& records, const fs::path& rgb) {
  std::ifstream in(records);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + records.string());
  std::vector<json> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(parse_record_line(line));
  }
  const std::string stem = rgb.stem().string();
  for (const auto& rec : lines) {
    if (rec.contains("frame") && fs::path(rec["frame"].get<std::string>()).stem().string() == stem) {
      return model_from_record(rec);
    }
  }
  if (lines.size() == 1) return model_from_record(lines.front());
  return std::nullopt;
}

int overlay(Context& ctx, const AppConfig& cfg, const OverlayOptions& o) {
  if (o.model && o.depth) throw UsageError("--model and --depth are mutually exclusive");
  const fs::path rgb_path(o.rgb);
  const RgbImage rgb = load_rgb(rgb_path);

  std::optional<FurrowEdgeModel> model;
  if (o.model) {
    model = model_for_frame(*o.model, rgb_path);
  } else if (o.depth) {
    try {
      model = detect_furrow(load_depth(*o.depth, cfg.io.depth_scale), cfg.detector);
    } catch (const Error& e) {
      ctx.log().warn("{}: detection failed: {}", rgb_path.filename().string(), e.what());
    }
  }

  std::optional<LaneLines> lanes;
  if (model) {
    try {
      lanes = lane_lines(*model, cfg.camera, cfg.guidance);
    } catch (const Error& e) {
      ctx.log().warn("no lane lines: {}", e.what());
    }
  }
  const DepartureStatus status = departure_status(model, cfg.camera, cfg.guidance);
  const RgbImage annotated = render_overlay(rgb, model, lanes, status);

  const fs::path dest =
      o.output ? fs::path(*o.output)
               : fs::path(cfg.io.out_dir) / (rgb_path.stem().string() + "_overlay.png");
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  save_rgb(annotated, dest);
  ctx.out() << "status=" << departure_state_name(status.state) << " offset_m="
            << (std::isfinite(status.lateral_offset) ? format_double(status.lateral_offset) : "nan")
            << '\n';
  return kExitOk;
}

// eval -----------------------------------------------------------------------

struct EvalOptions {
  std::string manifest;
  double tolerance = 3.0;
  double threshold = 0.5;
  std::optional<std::string> output;
};

int eval(Context& ctx, const EvalOptions& o) {
  if (!(o.tolerance >= 0.0)) throw UsageError("--tolerance must be non-negative");
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) throw UsageError("--threshold must be in [0, 1]");
  const fs::path manifest_path(o.manifest);
  const DatasetManifest manifest = read_manifest(manifest_path);
  if (manifest.records.empty()) throw Error(ErrorCode::kEmptyDataset, "manifest has no records");
  const fs::path base = manifest_path.parent_path();

  std::vector<SoftMask> preds;
  std::vector<EdgeMask> gts;
  json per_image = json::array();
  std::size_t tp = 0, predicted = 0, truth = 0;
  for (const auto& rec : manifest.records) {
    preds.push_back(load_soft_mask(resolve(base, rec.image_path)));
    gts.push_back(load_mask(resolve(base, rec.mask_path)));
    const EdgeScore s = score_edges(preds.back(), gts.back(), o.tolerance, o.threshold);
    tp += s.true_positives;
    predicted += s.predicted;
    truth += s.ground_truth;
    per_image.push_back(json{{"image", rec.image_path},
                             {"precision", s.precision},
                             {"recall", s.recall},
                             {"f1", s.f1}});
  }
  const double precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
  const double recall = truth ? static_cast<double>(tp) / static_cast<double>(truth) : 0.0;
  const OdsOisResult ods = ods_ois(preds, gts, o.tolerance);

  const json report{{"images", manifest.records.size()},
                    {"tolerance", o.tolerance},
                    {"threshold", o.threshold},
                    {"precision", precision},
                    {"recall", recall},
                    {"f1", f1_score(precision, recall)},
                    {"ods_f1", ods.ods_f1},
                    {"ods_threshold", ods.ods_threshold},
                    {"ois_f1", ods.ois_f1},
                    {"per_image", per_image}};
  if (o.output) {
    const fs::path p(*o.output);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream(p) << report.dump(2) << '\n';
  }
  ctx.out() << report.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Furrow-edge detection toolkit", "furrow"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  GlobalOptions g;
  app.add_option("--config", g.config, "INI-style config file")->check(CLI::ExistingFile);
  app.add_option("--out-dir", g.out_dir, "Output directory (overrides io.out_dir)");
  app.add_option("--jobs", g.jobs, "Frames processed in parallel")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for detector, augmentation and rendering");
  app.add_option("--depth-scale", g.depth_scale, "Meters per depth unit (overrides io.depth_scale)");
  app.add_flag("--dump-defaults", g.dump_defaults, "Print the effective configuration and exit");

  DetectTmOptions tm;
  auto* tm_cmd = app.add_subcommand("detect-tm", "Template-matching edge detection on depth maps");
  tm_cmd->add_option("inputs", tm.inputs, "Depth files or directories")->required();
  tm_cmd->add_flag("--masks", tm.masks, "Write rasterized edge masks to <out-dir>/masks");
  tm_cmd->add_option("--candidates", tm.candidates, "CSV of per-band candidate points");
  tm_cmd->add_option("--output", tm.output, "Write JSON lines here instead of stdout");

  std::vector<std::string> canny_inputs;
  auto* canny_cmd = app.add_subcommand("detect-canny", "Otsu-Canny baseline on RGB images");
  canny_cmd->add_option("inputs", canny_inputs, "RGB files or directories")->required();

  SynthOptions sy;
  auto* synth_cmd = app.add_subcommand("synth", "Render synthetic furrow scenes with ground truth");
  synth_cmd->add_option("--count", sy.count, "Frames to render");
  synth_cmd->add_option("--frames-per-capture", sy.frames_per_capture,
                        "Consecutive frames sharing one scene");
  synth_cmd->add_flag("--randomize", sy.randomize, "Draw a seeded random scene per capture");
  synth_cmd->add_option("--dropout", sy.dropout, "Target fraction of dropped-out pixels");
  synth_cmd->add_option("--prefix", sy.prefix, "File name prefix");

  AnnotateOptions an;
  auto* annotate_cmd = app.add_subcommand("annotate", "Label depth frames with the detector");
  annotate_cmd->add_option("inputs", an.inputs, "Depth files or directories")->required();
  annotate_cmd->add_option("--split", an.split, "Put every record in this split");
  annotate_cmd->add_option("--manifest", an.manifest, "Manifest file name inside <out-dir>");

  AugmentOptions au;
  auto* augment_cmd_ptr = app.add_subcommand("augment", "Augment a labeled manifest");
  augment_cmd_ptr->add_option("manifest", au.manifest, "Input manifest")->required()->check(CLI::ExistingFile);
  augment_cmd_ptr->add_option("--input-kind", au.kind, "depth or rgb");
  augment_cmd_ptr->add_option("--manifest-out", au.output_manifest, "Manifest file name inside <out-dir>");

  OverlayOptions ov;
  auto* overlay_cmd = app.add_subcommand("overlay", "Draw edge, lane lines and departure status");
  overlay_cmd->add_option("rgb", ov.rgb, "RGB frame")->required()->check(CLI::ExistingFile);
  overlay_cmd->add_option("--model", ov.model, "JSON-lines model records");
  overlay_cmd->add_option("--depth", ov.depth, "Depth frame to detect the edge from");
  overlay_cmd->add_option("--output", ov.output, "Annotated PNG path");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted masks against ground truth");
  eval_cmd->add_option("manifest", ev.manifest, "Manifest of prediction/ground-truth pairs")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--tolerance", ev.tolerance, "Match distance in pixels");
  eval_cmd->add_option("--threshold", ev.threshold, "Binarization threshold for P/R/F");
  eval_cmd->add_option("--output", ev.output, "Also write the JSON report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Context ctx(out, err);
  AppConfig cfg;
  try {
    cfg = effective_config(g);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (g.dump_defaults) {
    out << dump_config(cfg);
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    err << "error: a subcommand is required\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*tm_cmd) return detect_tm(ctx, cfg, g, tm);
    if (*canny_cmd) return detect_canny(ctx, cfg, g, canny_inputs);
    if (*synth_cmd) return synth(ctx, cfg, g, sy);
    if (*annotate_cmd) return annotate(ctx, cfg, g, an);
    if (*augment_cmd_ptr) return augment_cmd(ctx, cfg, g, au);
    if (*overlay_cmd) return overlay(ctx, cfg, ov);
    if (*eval_cmd) return eval(ctx, ev);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    ctx.log().error("{} ({})", e.what(), error_code_name(e.code()));
    return kExitProcessing;
  } catch (const std::exception& e) {
    ctx.log().error("{}", e.what());
    return kExitProcessing;
  }
  return kExitUsage;
}

}  // namespace furrow::app
