#pragma once

#include "vesselaug/image.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vesselaug {

enum class JitterKind { Brightness, Contrast, Saturation };

inline constexpr std::array<JitterKind, 3> kJitterKinds{
    JitterKind::Brightness, JitterKind::Contrast, JitterKind::Saturation};

std::string_view to_string(JitterKind k);
JitterKind parse_jitter_kind(std::string_view s);

struct JitterParams {
  JitterKind kind = JitterKind::Brightness;
  double ratio = 0.0;  // [-1, 1]
};

// Each jitter clamps its output to [0,1]. Ratios outside [-1,1] throw.

/// v * (1 - b)
FloatRgb brightness(const FloatRgb& img, double b);
/// v * (1 - c) + mean_gray(img) * c
FloatRgb contrast(const FloatRgb& img, double c);
/// v * (1 - s) + gray(v) * s
FloatRgb saturation(const FloatRgb& img, double s);

FloatRgb apply_jitter(const FloatRgb& img, const JitterParams& p);
RgbImage apply_jitter(const RgbImage& img, const JitterParams& p);

struct SweepSpec {
  std::vector<double> ratios;
  std::vector<JitterKind> kinds{kJitterKinds.begin(), kJitterKinds.end()};

  /// -0.5 .. 0.5 step 0.1 without 0: ten ratios, thirty datasets.
  static SweepSpec defaults();
};

/// "<kind>_<ratio>", ratio in shortest round-trip form, e.g. "brightness_-0.3".
std::string sweep_dataset_name(JitterKind kind, double ratio);

}  // namespace vesselaug
