#pragma once

#include "vesselaug/augment.hpp"
#include "vesselaug/jitter.hpp"
#include "vesselaug/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>

namespace vesselaug {

/// Fixed default so casual runs are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 42;

/// Everything a run depends on, apart from its inputs and thread count.
struct ToolConfig {
  std::uint64_t seed = kDefaultSeed;
  AugmentationConfig augment;
  SweepSpec sweep = SweepSpec::defaults();
  double threshold = kDefaultThreshold;
  int probability_bits = 16;
};

/// All fields materialized.
nlohmann::json to_json(const ToolConfig& config);

/// Missing keys keep their defaults; unknown keys and bad values throw
/// ConfigError naming the key path.
ToolConfig config_from_json(const nlohmann::json& j, ToolConfig base = {});
ToolConfig load_config(const std::filesystem::path& path);

}  // namespace vesselaug
