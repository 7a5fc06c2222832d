#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace furrow {

enum class Split { kTrain, kVal, kTest };

std::string_view split_name(Split split) noexcept;
Split parse_split(std::string_view name);

struct ManifestRecord {
  std::string image_path;
  std::string mask_path;
  Split split = Split::kTrain;
  bool has_edge = false;
  std::string provenance;  // capture id, optionally followed by ':' and detail

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
};

/// UTF-8 TSV: header row, then image_path, mask_path, split, has_edge, provenance.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Capture id = provenance text before the first ':'.
std::string capture_of(const ManifestRecord& record);

/// True when no capture contributes records to more than one split.
bool splits_capture_disjoint(const DatasetManifest& manifest);

/// Capture id of a frame file: stem up to the last '_' ("fieldA_0012" -> "fieldA").
std::string capture_id_from_filename(const std::filesystem::path& path);

/// Whole captures go to one split, proportional to `weights` (train, val,
/// test), after a seeded shuffle.
std::map<std::string, Split> assign_splits(std::vector<std::string> captures,
                                           const std::array<double, 3>& weights,
                                           std::uint64_t seed);

}  // namespace furrow
