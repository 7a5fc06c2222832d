#include "furrow/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "furrow/error.hpp"

namespace furrow {

namespace {

constexpr std::string_view kHeader = "image_path\tmask_path\tsplit\thas_edge\tprovenance";

void check_field(const std::string& field) {
  if (field.find_first_of("\t\r\n") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "manifest field contains a tab or newline: " + field);
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::string_view split_name(Split split) noexcept {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kFormat, "unknown split '" + std::string(name) + "'");
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
  out << kHeader << '\n';
  for (const auto& r : manifest.records) {
    check_field(r.image_path);
    check_field(r.mask_path);
    check_field(r.provenance);
    out << r.image_path << '\t' << r.mask_path << '\t' << split_name(r.split) << '\t'
        << (r.has_edge ? 1 : 0) << '\t' << r.provenance << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing manifest " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read manifest " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kFormat, "empty manifest " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw Error(ErrorCode::kFormat, "unexpected manifest header in " + path.string());

  DatasetManifest manifest;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 5 || (f[3] != "0" && f[3] != "1")) {
      throw Error(ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(line_no) + ": malformed manifest record");
    }
    manifest.records.push_back({f[0], f[1], parse_split(f[2]), f[3] == "1", f[4]});
  }
  return manifest;
}

std::string capture_of(const ManifestRecord& record) {
  return record.provenance.substr(0, record.provenance.find(':'));
}

bool splits_capture_disjoint(const DatasetManifest& manifest) {
  std::map<std::string, Split> seen;
  for (const auto& r : manifest.records) {
    const auto [it, inserted] = seen.emplace(capture_of(r), r.split);
    if (!inserted && it->second != r.split) return false;
  }
  return true;
}

std::string capture_id_from_filename(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  const std::size_t cut = stem.rfind('_');
  return cut == std::string::npos || cut == 0 ? stem : stem.substr(0, cut);
}

std::map<std::string, Split> assign_splits(std::vector<std::string> captures,
                                           const std::array<double, 3>& weights,
                                           std::uint64_t seed) {
  const double total = weights[0] + weights[1] + weights[2];
  if (!(total > 0.0) || weights[0] < 0.0 || weights[1] < 0.0 || weights[2] < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "split weights must be non-negative with a positive sum");
  }
  std::sort(captures.begin(), captures.end());
  captures.erase(std::unique(captures.begin(), captures.end()), captures.end());
  std::mt19937_64 rng(seed);
  std::shuffle(captures.begin(), captures.end(), rng);

  std::map<std::string, Split> out;
  const double n = static_cast<double>(captures.size());
  for (std::size_t i = 0; i < captures.size(); ++i) {
    const double pos = (static_cast<double>(i) + 0.5) / n * total;
    Split s = Split::kTest;
    if (pos < weights[0]) {
      s = Split::kTrain;
    } else if (pos < weights[0] + weights[1]) {
      s = Split::kVal;
    }
    out[captures[i]] = s;
  }
  return out;
}

}  // namespace furrow
