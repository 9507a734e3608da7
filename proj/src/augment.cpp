#include "vesselaug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vesselaug {

namespace {

void check_range(Range r, const char* what) {
  if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string(what) + ": need 0 < lo <= hi, got [" +
                                std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]");
  }
}

void check_unit_range(Range r, const char* what) {
  if (!(r.lo >= 0.0) || !(r.hi <= 1.0) || !(r.lo <= r.hi)) {
    throw std::invalid_argument(std::string(what) + ": need 0 <= lo <= hi <= 1");
  }
}

void check_same_size(const FloatRgb& img, const FloatPlane& p, const char* what) {
  if (p.rows() != img.height() || p.cols() != img.width()) {
    throw std::invalid_argument(std::string(what) + ": plane size does not match image");
  }
}

}  // namespace

std::string_view to_string(Sampling s) {
  return s == Sampling::LogUniform ? "log_uniform" : "uniform";
}

Sampling parse_sampling(std::string_view s) {
  if (s == "log_uniform") return Sampling::LogUniform;
  if (s == "uniform") return Sampling::Uniform;
  throw std::invalid_argument("unknown sampling '" + std::string(s) +
                              "' (expected log_uniform or uniform)");
}

double sample_gamma(RngStream& rng, Range range, Sampling sampling) {
  check_range(range, "gamma range");
  if (sampling == Sampling::LogUniform) return rng.log_uniform(range.lo, range.hi);
  return range.lo == range.hi ? range.lo : rng.uniform(range.lo, range.hi);
}

// ---------------------------------------------------------------------------

FloatRgb cwrgc(const FloatRgb& img, const CwrgcParams& params) {
  FloatRgb out;
  for (int c = 0; c < 3; ++c) {
    const double g = params.gamma[c];
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("cwrgc: gamma must be positive, got " + std::to_string(g));
    }
    out.channels[c] = g == 1.0 ? img.channels[c] : img.channels[c].pow(g).eval();
  }
  return out;
}

RgbImage cwrgc(const RgbImage& img, const CwrgcParams& params) {
  return to_rgb_image(cwrgc(normalize(img), params));
}

CwrgcParams sample_cwrgc(RngStream& rng, Range range, Sampling sampling) {
  check_range(range, "cwrgc range");
  CwrgcParams p;
  for (auto& g : p.gamma) g = sample_gamma(rng, range, sampling);
  return p;
}

// ---------------------------------------------------------------------------

AttentionMap attention_map(const FloatRgb& img, const CwrvaParams& params,
                           const StructuringElementBank& bank) {
  for (double l : params.lambda) {
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("attention_map: lambda outside [0,1]");
  }
  const FloatPlane base = vessel_map(img, bank, params.source);
  AttentionMap map;
  for (int c = 0; c < 3; ++c) map.channels[c] = base * params.lambda[c];
  return map;
}

AttentionMap attention_map(const FloatRgb& img, const CwrvaParams& params) {
  return attention_map(img, params, build_se_bank(params.num_angles, params.length));
}

FloatRgb cwrva(const FloatRgb& img, const AttentionMap& map, double disturb) {
  if (!(disturb >= 0.0 && disturb <= 1.0)) {
    throw std::invalid_argument("cwrva: disturbing intensity must be in [0,1], got " +
                                std::to_string(disturb));
  }
  FloatRgb out;
  for (int c = 0; c < 3; ++c) {
    const FloatPlane& m = map.channels[c];
    check_same_size(img, m, "cwrva");
    out.channels[c] = img.channels[c] * (1.0 - m) + m * disturb;
  }
  return out;
}

RgbImage cwrva(const RgbImage& img, const AttentionMap& map, double disturb) {
  return to_rgb_image(cwrva(normalize(img), map, disturb));
}

CwrvaParams sample_cwrva(RngStream& rng, Range lambda_range, Range disturb_range) {
  check_unit_range(lambda_range, "lambda range");
  check_unit_range(disturb_range, "disturb range");
  CwrvaParams p;
  for (auto& l : p.lambda) l = rng.uniform(lambda_range.lo, lambda_range.hi);
  p.disturb = rng.uniform(disturb_range.lo, disturb_range.hi);
  return p;
}

// ---------------------------------------------------------------------------

FloatRgb rgn(const FloatRgb& img, RngStream& rng, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("rgn: sigma must be non-negative");
  }
  if (sigma == 0.0) return img;
  FloatRgb out = img;
  const int h = img.height();
  const int w = img.width();
  // Pixel-major, channel-minor draw order.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (auto& ch : out.channels) ch(y, x) += sigma * rng.normal();
    }
  }
  return clamp01(out);
}

Hsv rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double chroma = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? chroma / mx : 0.0;
  if (chroma > 0.0) {
    double h;
    if (mx == r) {
      h = (g - b) / chroma;
      if (h < 0.0) h += 6.0;
    } else if (mx == g) {
      h = (b - r) / chroma + 2.0;
    } else {
      h = (r - g) / chroma + 4.0;
    }
    out.h = h / 6.0;
    if (out.h >= 1.0) out.h -= 1.0;
  }
  return out;
}

std::array<double, 3> hsv_to_rgb(const Hsv& hsv) {
  const double v = hsv.v;
  const double s = hsv.s;
  if (s <= 0.0) return {v, v, v};
  const double h6 = hsv.h * 6.0;
  const int sector = std::min(static_cast<int>(std::floor(h6)), 5);
  const double f = h6 - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0:
      return {v, t, p};
    case 1:
      return {q, v, p};
    case 2:
      return {p, v, t};
    case 3:
      return {p, q, v};
    case 4:
      return {t, p, v};
    default:
      return {v, p, q};
  }
}

FloatRgb svgc_apply(const FloatRgb& img, double s_gamma, double v_gamma) {
  if (!(s_gamma > 0.0) || !(v_gamma > 0.0)) {
    throw std::invalid_argument("svgc: exponents must be positive");
  }
  FloatRgb out = img;
  if (s_gamma == 1.0 && v_gamma == 1.0) return out;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      Hsv hsv = rgb_to_hsv(img[Channel::R](y, x), img[Channel::G](y, x), img[Channel::B](y, x));
      hsv.s = std::pow(hsv.s, s_gamma);
      hsv.v = std::pow(hsv.v, v_gamma);
      const auto rgb = hsv_to_rgb(hsv);
      for (int c = 0; c < 3; ++c) out.channels[c](y, x) = rgb[c];
    }
  }
  return clamp01(out);
}

SvgcDraw sample_svgc(RngStream& rng, Range range, Sampling sampling) {
  check_range(range, "svgc range");
  SvgcDraw d;
  d.s_gamma = sample_gamma(rng, range, sampling);
  d.v_gamma = sample_gamma(rng, range, sampling);
  return d;
}

FloatRgb svgc(const FloatRgb& img, RngStream& rng, Range range, Sampling sampling) {
  const SvgcDraw d = sample_svgc(rng, range, sampling);
  return svgc_apply(img, d.s_gamma, d.v_gamma);
}

// ---------------------------------------------------------------------------

FlipDecision sample_flips(RngStream& rng, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("flip probability outside [0,1]");
  FlipDecision d;
  d.horizontal = rng.bernoulli(p);
  d.vertical = rng.bernoulli(p);
  return d;
}

Sample apply_flips(Sample sample, FlipDecision d) {
  if (d.horizontal) {
    sample.image = flip_horizontal(sample.image);
    for (auto& m : sample.masks) m = flip_horizontal(m);
  }
  if (d.vertical) {
    sample.image = flip_vertical(sample.image);
    for (auto& m : sample.masks) m = flip_vertical(m);
  }
  return sample;
}

Sample random_flips(Sample sample, RngStream& rng, double p) {
  return apply_flips(std::move(sample), sample_flips(rng, p));
}

// ---------------------------------------------------------------------------

void AugmentationConfig::validate() const {
  if (!(flips.probability >= 0.0 && flips.probability <= 1.0)) {
    throw std::invalid_argument("flips.probability must be in [0,1]");
  }
  if (!(rgn.sigma >= 0.0) || !std::isfinite(rgn.sigma)) {
    throw std::invalid_argument("rgn.sigma must be non-negative");
  }
  check_range(svgc.range, "svgc.range");
  check_range(cwrgc.range, "cwrgc.range");
  check_unit_range(cwrva.lambda_range, "cwrva.lambda_range");
  check_unit_range(cwrva.disturb_range, "cwrva.disturb_range");
  if (cwrva.num_angles < 1) throw std::invalid_argument("cwrva.num_angles must be >= 1");
  if (cwrva.length < 3 || cwrva.length % 2 == 0) {
    throw std::invalid_argument("cwrva.length must be odd and >= 3");
  }
  if (samples_per_image < 1) throw std::invalid_argument("samples_per_image must be >= 1");
}

AugmentationConfig AugmentationConfig::none() {
  AugmentationConfig c;
  c.flips.enabled = false;
  c.rgn.enabled = false;
  c.svgc.enabled = false;
  c.cwrgc.enabled = false;
  c.cwrva.enabled = false;
  return c;
}

std::vector<AugmentedSample> apply_pipeline(const RgbImage& img,
                                            const std::vector<BinaryPlane>& masks,
                                            const AugmentationConfig& config,
                                            const RngStream& rng, std::uint64_t image_index) {
  config.validate();
  for (const auto& m : masks) {
    if (m.rows() != img.height() || m.cols() != img.width()) {
      throw std::invalid_argument("apply_pipeline: mask size does not match image");
    }
  }
  const FloatRgb input = normalize(img);
  StructuringElementBank bank;
  if (config.cwrva.enabled) bank = build_se_bank(config.cwrva.num_angles, config.cwrva.length);

  std::vector<AugmentedSample> outputs;
  outputs.reserve(config.samples_per_image);
  for (int k = 0; k < config.samples_per_image; ++k) {
    auto stream = [&](Stage s) {
      return rng.substream({image_index, static_cast<std::uint64_t>(k),
                            static_cast<std::uint64_t>(s)});
    };
    AppliedParams applied;
    Sample sample{input, masks};

    if (config.flips.enabled) {
      RngStream r = stream(Stage::Flips);
      applied.flips = sample_flips(r, config.flips.probability);
      sample = apply_flips(std::move(sample), applied.flips);
    }
    if (config.rgn.enabled) {
      RngStream r = stream(Stage::Rgn);
      sample.image = rgn(sample.image, r, config.rgn.sigma);
      applied.rgn = true;
    }
    if (config.svgc.enabled) {
      RngStream r = stream(Stage::Svgc);
      applied.svgc = sample_svgc(r, config.svgc.range, config.svgc.sampling);
      sample.image = svgc_apply(sample.image, applied.svgc.s_gamma, applied.svgc.v_gamma);
      applied.svgc_applied = true;
    }
    if (config.cwrgc.enabled) {
      RngStream r = stream(Stage::Cwrgc);
      applied.cwrgc = sample_cwrgc(r, config.cwrgc.range, config.cwrgc.sampling);
      sample.image = cwrgc(sample.image, applied.cwrgc);
      applied.cwrgc_applied = true;
    }
    if (config.cwrva.enabled) {
      RngStream r = stream(Stage::Cwrva);
      CwrvaParams p = sample_cwrva(r, config.cwrva.lambda_range, config.cwrva.disturb_range);
      p.num_angles = config.cwrva.num_angles;
      p.length = config.cwrva.length;
      p.source = config.cwrva.source;
      // Attention is computed on the already gamma-corrected image.
      const AttentionMap map = attention_map(sample.image, p, bank);
      sample.image = cwrva(sample.image, map, p.disturb);
      applied.lambda = p.lambda;
      applied.disturb = p.disturb;
      applied.cwrva_applied = true;
    }
    outputs.push_back({to_rgb_image(sample.image), std::move(sample.masks), applied});
  }
  return outputs;
}

}  // namespace vesselaug
