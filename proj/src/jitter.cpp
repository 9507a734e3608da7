#include "vesselaug/jitter.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace vesselaug {

namespace {

void check_ratio(double r, const char* what) {
  if (!(r >= -1.0 && r <= 1.0)) {
    throw std::invalid_argument(fmt::format("{} ratio must be in [-1, 1], got {}", what, r));
  }
}

}  // namespace

std::string_view to_string(JitterKind k) {
  switch (k) {
    case JitterKind::Brightness:
      return "brightness";
    case JitterKind::Contrast:
      return "contrast";
    case JitterKind::Saturation:
      return "saturation";
  }
  return "brightness";
}

JitterKind parse_jitter_kind(std::string_view s) {
  for (JitterKind k : kJitterKinds) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument(
      fmt::format("unknown jitter kind '{}' (expected brightness, contrast or saturation)", s));
}

FloatRgb brightness(const FloatRgb& img, double b) {
  check_ratio(b, "brightness");
  if (b == 0.0) return img;
  FloatRgb out;
  for (int c = 0; c < 3; ++c) out.channels[c] = img.channels[c] * (1.0 - b);
  return clamp01(out);
}

FloatRgb contrast(const FloatRgb& img, double c) {
  check_ratio(c, "contrast");
  if (c == 0.0) return img;
  const double mean = mean_gray(img);
  FloatRgb out;
  for (int i = 0; i < 3; ++i) out.channels[i] = img.channels[i] * (1.0 - c) + mean * c;
  return clamp01(out);
}

FloatRgb saturation(const FloatRgb& img, double s) {
  check_ratio(s, "saturation");
  if (s == 0.0) return img;
  const FloatPlane gray = rgb_to_gray(img);
  FloatRgb out;
  for (int i = 0; i < 3; ++i) out.channels[i] = img.channels[i] * (1.0 - s) + gray * s;
  return clamp01(out);
}

FloatRgb apply_jitter(const FloatRgb& img, const JitterParams& p) {
  switch (p.kind) {
    case JitterKind::Brightness:
      return brightness(img, p.ratio);
    case JitterKind::Contrast:
      return contrast(img, p.ratio);
    case JitterKind::Saturation:
      return saturation(img, p.ratio);
  }
  return img;
}

RgbImage apply_jitter(const RgbImage& img, const JitterParams& p) {
  return to_rgb_image(apply_jitter(normalize(img), p));
}

SweepSpec SweepSpec::defaults() {
  SweepSpec spec;
  for (int k = -5; k <= 5; ++k) {
    if (k != 0) spec.ratios.push_back(k / 10.0);
  }
  return spec;
}

std::string sweep_dataset_name(JitterKind kind, double ratio) {
  return fmt::format("{}_{}", to_string(kind), ratio);
}

}  // namespace vesselaug
