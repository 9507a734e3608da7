#pragma once

#include "vesselaug/jitter.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vesselaug {

namespace fs = std::filesystem;

// Manifests are JSON Lines. The first non-comment line is a header object
// carrying "schema" and "version"; every following line is one record.
// Blank lines and lines starting with '#' are skipped.
//
//   {"schema":"vesselaug.dataset","version":1}
//   {"id":"21","image":"images/21.png","truth":"truth/21.png","fov":"mask/21.png"}

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kDatasetSchema = "vesselaug.dataset";
inline constexpr const char* kSweepSchema = "vesselaug.sweep";

struct ManifestEntry {
  std::string id;
  fs::path image;
  std::optional<fs::path> truth;
  std::optional<fs::path> fov;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Entry paths are relative to `root` (the manifest's directory) unless absolute.
struct DatasetManifest {
  fs::path root;
  std::vector<ManifestEntry> entries;

  fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : root / p; }
  const ManifestEntry* find(const std::string& id) const;
};

/// Throws ConfigError with "<file>:<line>: ..." diagnostics, DataError on
/// duplicate ids.
DatasetManifest load_manifest(const fs::path& path);
void save_manifest(const DatasetManifest& manifest, const fs::path& path);

/// Throws DataError naming the first repeated or malformed id.
void check_ids(const DatasetManifest& manifest);

struct SweepEntry {
  std::string name;
  JitterKind kind = JitterKind::Brightness;
  double ratio = 0.0;
  fs::path manifest;  // relative to the sweep root
  bool complete = true;
  std::vector<std::string> errors;
};

//   {"schema":"vesselaug.sweep","version":1,"source":"../drive/test.jsonl"}
//   {"name":"brightness_-0.5","kind":"brightness","ratio":-0.5,
//    "manifest":"brightness_-0.5/manifest.jsonl","complete":true,"errors":[]}
struct SweepManifest {
  fs::path root;
  std::string source;
  std::vector<SweepEntry> entries;
};

SweepManifest load_sweep_manifest(const fs::path& path);
void save_sweep_manifest(const SweepManifest& manifest, const fs::path& path);

}  // namespace vesselaug
