#include "furrow/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace furrow::app {
namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kConfig, "invalid value '" + value + "' for " + key);
}

std::string format(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}
std::string format(int v) { return std::to_string(v); }
std::string format(std::uint64_t v) { return std::to_string(v); }
std::string format(bool v) { return v ? "true" : "false"; }

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) bad_value(key, text);
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_value(key, text);
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const AppConfig&)> get;
  std::function<void(AppConfig&, const std::string&)> set;
};

template <typename S, typename T>
Field number(std::string section, std::string key, S AppConfig::*sec, T S::*member) {
  std::string full = section + "." + key;
  return {std::move(section), std::move(key),
          [=](const AppConfig& c) { return format((c.*sec).*member); },
          [=](AppConfig& c, const std::string& v) { (c.*sec).*member = parse_number<T>(full, v); }};
}

template <typename S>
Field flag(std::string section, std::string key, S AppConfig::*sec, bool S::*member) {
  std::string full = section + "." + key;
  return {std::move(section), std::move(key),
          [=](const AppConfig& c) { return format((c.*sec).*member); },
          [=](AppConfig& c, const std::string& v) { (c.*sec).*member = parse_bool(full, v); }};
}

template <typename S>
Field roi_part(std::string key, int Roi::*part, Roi S::*roi, S AppConfig::*sec) {
  std::string full = "detector." + key;
  return {"detector", std::move(key),
          [=](const AppConfig& c) { return format(((c.*sec).*roi).*part); },
          [=](AppConfig& c, const std::string& v) {
            ((c.*sec).*roi).*part = parse_number<int>(full, v);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = [] {
    using A = AppConfig;
    std::vector<Field> f;
    f.push_back(number("detector", "starting_depth", &A::detector, &DetectorConfig::starting_depth));
    f.push_back(number("detector", "band_width", &A::detector, &DetectorConfig::band_width));
    f.push_back(number("detector", "band_shift", &A::detector, &DetectorConfig::band_shift));
    f.push_back({"detector", "max_bands",
                 [](const A& c) {
                   return c.detector.max_bands ? format(*c.detector.max_bands) : std::string("inf");
                 },
                 [](A& c, const std::string& v) {
                   if (v == "inf" || v == "infinity") {
                     c.detector.max_bands.reset();
                   } else {
                     c.detector.max_bands = parse_number<int>("detector.max_bands", v);
                   }
                 }});
    f.push_back(number("detector", "template_size", &A::detector, &DetectorConfig::template_size));
    f.push_back(number("detector", "score_threshold", &A::detector, &DetectorConfig::score_threshold));
    f.push_back(number("detector", "ransac_threshold", &A::detector, &DetectorConfig::ransac_threshold));
    f.push_back(number("detector", "ransac_iterations", &A::detector, &DetectorConfig::ransac_iterations));
    f.push_back(roi_part("roi_x_min", &Roi::x_min, &DetectorConfig::roi, &A::detector));
    f.push_back(roi_part("roi_x_max", &Roi::x_max, &DetectorConfig::roi, &A::detector));
    f.push_back(roi_part("roi_y_min", &Roi::y_min, &DetectorConfig::roi, &A::detector));
    f.push_back(roi_part("roi_y_max", &Roi::y_max, &DetectorConfig::roi, &A::detector));
    f.push_back(number("detector", "fit_degree", &A::detector, &DetectorConfig::fit_degree));
    f.push_back(number("detector", "rng_seed", &A::detector, &DetectorConfig::rng_seed));
    f.push_back(number("detector", "max_invalid_fraction", &A::detector,
                       &DetectorConfig::max_invalid_fraction));
    f.push_back(flag("detector", "subpixel", &A::detector, &DetectorConfig::subpixel));

    f.push_back(number("classical", "blur_kernel", &A::classical, &ClassicalConfig::blur_kernel));
    f.push_back(number("classical", "blur_sigma", &A::classical, &ClassicalConfig::blur_sigma));
    f.push_back(number("classical", "low_ratio", &A::classical, &ClassicalConfig::low_ratio));
    f.push_back(number("classical", "sobel_aperture", &A::classical, &ClassicalConfig::sobel_aperture));

    f.push_back(number("camera", "fx", &A::camera, &CameraModel::fx));
    f.push_back(number("camera", "fy", &A::camera, &CameraModel::fy));
    f.push_back(number("camera", "cx", &A::camera, &CameraModel::cx));
    f.push_back(number("camera", "cy", &A::camera, &CameraModel::cy));
    f.push_back(number("camera", "pitch", &A::camera, &CameraModel::pitch));
    f.push_back(number("camera", "roll", &A::camera, &CameraModel::roll));
    f.push_back(number("camera", "height", &A::camera, &CameraModel::height));
    f.push_back(number("camera", "image_width", &A::camera, &CameraModel::image_width));
    f.push_back(number("camera", "image_height", &A::camera, &CameraModel::image_height));

    f.push_back(number("guidance", "wheel_width", &A::guidance, &GuidanceConfig::wheel_width));
    f.push_back(number("guidance", "lookahead", &A::guidance, &GuidanceConfig::lookahead));
    f.push_back(number("guidance", "warn_threshold", &A::guidance, &GuidanceConfig::warn_threshold));
    f.push_back({"guidance", "wheel_column",
                 [](const A& c) {
                   return c.guidance.wheel_column ? format(*c.guidance.wheel_column)
                                                  : std::string("auto");
                 },
                 [](A& c, const std::string& v) {
                   if (v == "auto") {
                     c.guidance.wheel_column.reset();
                   } else {
                     c.guidance.wheel_column = parse_number<double>("guidance.wheel_column", v);
                   }
                 }});
    f.push_back(number("guidance", "max_distance", &A::guidance, &GuidanceConfig::max_distance));

    f.push_back(number("augment", "max_rotation", &A::augment, &AugmentSpec::max_rotation));
    f.push_back(number("augment", "max_shift", &A::augment, &AugmentSpec::max_shift));
    f.push_back(number("augment", "crop_size", &A::augment, &AugmentSpec::crop_size));
    f.push_back(number("augment", "negative_fraction", &A::augment, &AugmentSpec::negative_fraction));
    f.push_back(number("augment", "copies_per_frame", &A::augment, &AugmentSpec::copies_per_frame));
    f.push_back(number("augment", "rng_seed", &A::augment, &AugmentSpec::rng_seed));

    f.push_back(number("quality", "min_inlier_ratio", &A::quality, &QualityGate::min_inlier_ratio));
    f.push_back(number("quality", "min_candidates", &A::quality, &QualityGate::min_candidates));

    f.push_back(number("scene", "edge_alpha", &A::scene, &SceneSpec::edge_alpha));
    f.push_back(number("scene", "edge_beta", &A::scene, &SceneSpec::edge_beta));
    f.push_back(number("scene", "edge_gamma", &A::scene, &SceneSpec::edge_gamma));
    f.push_back(number("scene", "trench_depth", &A::scene, &SceneSpec::trench_depth));
    f.push_back(number("scene", "albedo_left", &A::scene, &SceneSpec::albedo_left));
    f.push_back(number("scene", "albedo_right", &A::scene, &SceneSpec::albedo_right));
    f.push_back(number("scene", "max_range", &A::scene, &SceneSpec::max_range));

    f.push_back(number("corruption", "noise_sigma_coeff", &A::corruption,
                       &CorruptionSpec::noise_sigma_coeff));
    f.push_back(number("corruption", "dropout_blob_count", &A::corruption,
                       &CorruptionSpec::dropout_blob_count));
    f.push_back(number("corruption", "dropout_blob_radius", &A::corruption,
                       &CorruptionSpec::dropout_blob_radius));
    f.push_back({"corruption", "pile",
                 [](const A& c) {
                   if (!c.corruption.pile) return std::string("none");
                   const SoilPile& p = *c.corruption.pile;
                   return format(p.center_x) + "," + format(p.center_z) + "," + format(p.radius) +
                          "," + format(p.height);
                 },
                 [](A& c, const std::string& v) {
                   if (v == "none") {
                     c.corruption.pile.reset();
                     return;
                   }
                   std::vector<double> parts;
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ',')) {
                     const auto b = item.find_first_not_of(' ');
                     const auto e = item.find_last_not_of(' ');
                     if (b == std::string::npos) bad_value("corruption.pile", v);
                     parts.push_back(parse_number<double>("corruption.pile", item.substr(b, e - b + 1)));
                   }
                   if (parts.size() != 4) bad_value("corruption.pile", v);
                   c.corruption.pile = SoilPile{parts[0], parts[1], parts[2], parts[3]};
                 }});
    f.push_back(number("corruption", "rng_seed", &A::corruption, &CorruptionSpec::rng_seed));

    f.push_back(number("io", "depth_scale", &A::io, &IoConfig::depth_scale));
    f.push_back({"io", "out_dir", [](const A& c) { return c.io.out_dir; },
                 [](A& c, const std::string& v) { c.io.out_dir = v; }});
    return f;
  }();
  return kFields;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

}  // namespace

AppConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config syntax: ") + e.what());
  }

  AppConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw Error(ErrorCode::kConfig, "key '" + section + "' outside of a [section]");
    }
    for (const auto& [key, node] : body) {
      const Field* field = find_field(section, key);
      if (!field) throw Error(ErrorCode::kConfig, "unknown config key " + section + "." + key);
      field->set(cfg, unquote(node.get_value<std::string>()));
    }
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string dump_config(const AppConfig& cfg) {
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    if (f.section != current) {
      if (!current.empty()) out += '\n';
      out += "[" + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace furrow::app
