#include "vesselaug/config.hpp"

#include "vesselaug/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

namespace vesselaug {

using nlohmann::json;

namespace {

json range_json(Range r) { return json::array({r.lo, r.hi}); }

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }

  template <typename T>
  void get(const char* key, T& out) {
    auto it = find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("{}.{}: wrong type", path_, key));
    }
  }

  void get(const char* key, Range& out) {
    auto it = find(key);
    if (it == j_.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      throw ConfigError(fmt::format("{}.{}: expected [lo, hi]", path_, key));
    }
    out = Range{(*it)[0].get<double>(), (*it)[1].get<double>()};
  }

  void get(const char* key, Sampling& out) {
    std::string s;
    if (!has(key)) return;
    get(key, s);
    try {
      out = parse_sampling(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}.{}: {}", path_, key, e.what()));
    }
  }

  void get(const char* key, SourcePlane& out) {
    std::string s;
    if (!has(key)) return;
    get(key, s);
    try {
      out = parse_source_plane(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}.{}: {}", path_, key, e.what()));
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Reader child(const char* key) {
    auto it = find(key);
    static const json empty = json::object();
    return Reader(it == j_.end() ? empty : *it, path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", path_, key));
    }
  }

  const std::string& path() const { return path_; }

 private:
  json::const_iterator find(const char* key) {
    seen_.insert(key);
    return j_.find(key);
  }
  std::string where() const { return path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const ToolConfig& c) {
  const auto& a = c.augment;
  json kinds = json::array();
  for (JitterKind k : c.sweep.kinds) kinds.push_back(std::string(to_string(k)));
  return json{
      {"seed", c.seed},
      {"samples_per_image", a.samples_per_image},
      {"flips", {{"enabled", a.flips.enabled}, {"probability", a.flips.probability}}},
      {"rgn", {{"enabled", a.rgn.enabled}, {"sigma", a.rgn.sigma}}},
      {"svgc",
       {{"enabled", a.svgc.enabled},
        {"range", range_json(a.svgc.range)},
        {"sampling", std::string(to_string(a.svgc.sampling))}}},
      {"cwrgc",
       {{"enabled", a.cwrgc.enabled},
        {"range", range_json(a.cwrgc.range)},
        {"sampling", std::string(to_string(a.cwrgc.sampling))}}},
      {"cwrva",
       {{"enabled", a.cwrva.enabled},
        {"lambda_range", range_json(a.cwrva.lambda_range)},
        {"disturb_range", range_json(a.cwrva.disturb_range)},
        {"num_angles", a.cwrva.num_angles},
        {"length", a.cwrva.length},
        {"source", std::string(to_string(a.cwrva.source))}}},
      {"sweep", {{"ratios", c.sweep.ratios}, {"kinds", kinds}}},
      {"eval", {{"threshold", c.threshold}, {"probability_bits", c.probability_bits}}},
  };
}

ToolConfig config_from_json(const json& j, ToolConfig c) {
  Reader root(j, "config");
  auto& a = c.augment;
  root.get("seed", c.seed);
  root.get("samples_per_image", a.samples_per_image);
  {
    Reader r = root.child("flips");
    r.get("enabled", a.flips.enabled);
    r.get("probability", a.flips.probability);
    r.finish();
  }
  {
    Reader r = root.child("rgn");
    r.get("enabled", a.rgn.enabled);
    r.get("sigma", a.rgn.sigma);
    r.finish();
  }
  {
    Reader r = root.child("svgc");
    r.get("enabled", a.svgc.enabled);
    r.get("range", a.svgc.range);
    r.get("sampling", a.svgc.sampling);
    r.finish();
  }
  {
    Reader r = root.child("cwrgc");
    r.get("enabled", a.cwrgc.enabled);
    r.get("range", a.cwrgc.range);
    r.get("sampling", a.cwrgc.sampling);
    r.finish();
  }
  {
    Reader r = root.child("cwrva");
    r.get("enabled", a.cwrva.enabled);
    r.get("lambda_range", a.cwrva.lambda_range);
    r.get("disturb_range", a.cwrva.disturb_range);
    r.get("num_angles", a.cwrva.num_angles);
    r.get("length", a.cwrva.length);
    r.get("source", a.cwrva.source);
    r.finish();
  }
  {
    Reader r = root.child("sweep");
    r.get("ratios", c.sweep.ratios);
    if (r.has("kinds")) {
      std::vector<std::string> names;
      r.get("kinds", names);
      c.sweep.kinds.clear();
      for (const auto& n : names) {
        try {
          c.sweep.kinds.push_back(parse_jitter_kind(n));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(fmt::format("config.sweep.kinds: {}", e.what()));
        }
      }
    }
    r.finish();
  }
  {
    Reader r = root.child("eval");
    r.get("threshold", c.threshold);
    r.get("probability_bits", c.probability_bits);
    r.finish();
  }
  root.finish();

  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
    throw ConfigError("config.eval.threshold must be in [0,1]");
  }
  if (c.probability_bits != 8 && c.probability_bits != 16) {
    throw ConfigError("config.eval.probability_bits must be 8 or 16");
  }
  for (double r : c.sweep.ratios) {
    if (!(r >= -1.0 && r <= 1.0)) {
      throw ConfigError(fmt::format("config.sweep.ratios: {} outside [-1, 1]", r));
    }
  }
  return c;
}

ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

}  // namespace vesselaug
