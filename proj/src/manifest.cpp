#include "vesselaug/manifest.hpp"

#include "vesselaug/errors.hpp"
#include "vesselaug/io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace vesselaug {

using nlohmann::json;

namespace {

struct Record {
  int line = 0;
  json value;
};

struct ParsedFile {
  json header;
  int header_line = 0;
  std::vector<Record> records;
};

ParsedFile parse_jsonl(const fs::path& path, const char* schema) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open manifest '{}'", path.string()));
  ParsedFile out;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(fmt::format("{}:{}: invalid JSON: {}", path.string(), lineno, e.what()));
    }
    if (!value.is_object()) {
      throw ConfigError(fmt::format("{}:{}: expected a JSON object", path.string(), lineno));
    }
    if (!have_header) {
      if (!value.contains("schema") || value["schema"] != schema) {
        throw ConfigError(fmt::format("{}:{}: header must declare \"schema\":\"{}\"",
                                      path.string(), lineno, schema));
      }
      if (!value.contains("version") || !value["version"].is_number_integer()) {
        throw ConfigError(
            fmt::format("{}:{}: header field 'version' missing", path.string(), lineno));
      }
      if (value["version"].get<int>() != kManifestVersion) {
        throw ConfigError(fmt::format("{}:{}: unsupported version {} (expected {})",
                                      path.string(), lineno, value["version"].get<int>(),
                                      kManifestVersion));
      }
      out.header = std::move(value);
      out.header_line = lineno;
      have_header = true;
      continue;
    }
    out.records.push_back({lineno, std::move(value)});
  }
  if (!have_header) throw ConfigError(fmt::format("{}: empty manifest", path.string()));
  return out;
}

std::string require_string(const Record& r, const char* field, const fs::path& path) {
  auto it = r.value.find(field);
  if (it == r.value.end()) {
    throw ConfigError(fmt::format("{}:{}: field '{}' missing", path.string(), r.line, field));
  }
  if (!it->is_string() || it->get<std::string>().empty()) {
    throw ConfigError(
        fmt::format("{}:{}: field '{}' must be a non-empty string", path.string(), r.line, field));
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const Record& r, const char* field,
                                           const fs::path& path) {
  auto it = r.value.find(field);
  if (it == r.value.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ConfigError(
        fmt::format("{}:{}: field '{}' must be a string", path.string(), r.line, field));
  }
  return it->get<std::string>();
}

void reject_unknown(const Record& r, std::initializer_list<const char*> allowed,
                    const fs::path& path) {
  for (const auto& [key, _] : r.value.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) {
      throw ConfigError(fmt::format("{}:{}: unknown field '{}'", path.string(), r.line, key));
    }
  }
}

void write_lines(const std::vector<json>& lines, const fs::path& path) {
  std::string text;
  for (const auto& l : lines) {
    text += l.dump();
    text += '\n';
  }
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

fs::path root_of(const fs::path& manifest_path) {
  const fs::path parent = manifest_path.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

}  // namespace

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

void check_ids(const DatasetManifest& manifest) {
  std::set<std::string> seen;
  for (const auto& e : manifest.entries) {
    if (e.id.empty() || e.id.find_first_of("/\\") != std::string::npos || e.id == "." ||
        e.id == "..") {
      throw DataError(fmt::format("invalid id '{}': ids must be non-empty file-name safe", e.id));
    }
    if (!seen.insert(e.id).second) throw DataError(fmt::format("duplicate id '{}'", e.id));
  }
}

DatasetManifest load_manifest(const fs::path& path) {
  const ParsedFile parsed = parse_jsonl(path, kDatasetSchema);
  DatasetManifest m;
  m.root = root_of(path);
  for (const auto& r : parsed.records) {
    reject_unknown(r, {"id", "image", "truth", "fov"}, path);
    ManifestEntry e;
    e.id = require_string(r, "id", path);
    e.image = require_string(r, "image", path);
    if (auto t = optional_string(r, "truth", path)) e.truth = *t;
    if (auto f = optional_string(r, "fov", path)) e.fov = *f;
    m.entries.push_back(std::move(e));
  }
  try {
    check_ids(m);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  check_ids(manifest);
  std::vector<json> lines;
  lines.push_back(json{{"schema", kDatasetSchema}, {"version", kManifestVersion}});
  for (const auto& e : manifest.entries) {
    json j = {{"id", e.id}, {"image", e.image.generic_string()}};
    if (e.truth) j["truth"] = e.truth->generic_string();
    if (e.fov) j["fov"] = e.fov->generic_string();
    lines.push_back(std::move(j));
  }
  write_lines(lines, path);
}

SweepManifest load_sweep_manifest(const fs::path& path) {
  const ParsedFile parsed = parse_jsonl(path, kSweepSchema);
  SweepManifest m;
  m.root = root_of(path);
  if (auto it = parsed.header.find("source"); it != parsed.header.end() && it->is_string()) {
    m.source = it->get<std::string>();
  }
  std::set<std::string> names;
  for (const auto& r : parsed.records) {
    reject_unknown(r, {"name", "kind", "ratio", "manifest", "complete", "errors"}, path);
    SweepEntry e;
    e.name = require_string(r, "name", path);
    try {
      e.kind = parse_jitter_kind(require_string(r, "kind", path));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), r.line, ex.what()));
    }
    if (!r.value.contains("ratio") || !r.value["ratio"].is_number()) {
      throw ConfigError(fmt::format("{}:{}: field 'ratio' must be a number", path.string(), r.line));
    }
    e.ratio = r.value["ratio"].get<double>();
    e.manifest = require_string(r, "manifest", path);
    if (auto it = r.value.find("complete"); it != r.value.end()) {
      if (!it->is_boolean()) {
        throw ConfigError(
            fmt::format("{}:{}: field 'complete' must be a boolean", path.string(), r.line));
      }
      e.complete = it->get<bool>();
    }
    if (auto it = r.value.find("errors"); it != r.value.end()) {
      if (!it->is_array()) {
        throw ConfigError(
            fmt::format("{}:{}: field 'errors' must be an array", path.string(), r.line));
      }
      for (const auto& msg : *it) e.errors.push_back(msg.is_string() ? msg.get<std::string>() : msg.dump());
    }
    if (!names.insert(e.name).second) {
      throw DataError(fmt::format("{}:{}: duplicate dataset '{}'", path.string(), r.line, e.name));
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_sweep_manifest(const SweepManifest& manifest, const fs::path& path) {
  std::vector<json> lines;
  lines.push_back(
      json{{"schema", kSweepSchema}, {"version", kManifestVersion}, {"source", manifest.source}});
  for (const auto& e : manifest.entries) {
    lines.push_back(json{{"name", e.name},
                         {"kind", std::string(to_string(e.kind))},
                         {"ratio", e.ratio},
                         {"manifest", e.manifest.generic_string()},
                         {"complete", e.complete},
                         {"errors", e.errors}});
  }
  write_lines(lines, path);
}

}  // namespace vesselaug
