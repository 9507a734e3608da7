#pragma once

#include "vesselaug/image.hpp"
#include "vesselaug/morphology.hpp"
#include "vesselaug/rng.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace vesselaug {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

enum class Sampling { LogUniform, Uniform };

std::string_view to_string(Sampling s);
Sampling parse_sampling(std::string_view s);

/// Draws one exponent from [lo, hi]. Throws unless 0 < lo <= hi.
double sample_gamma(RngStream& rng, Range range, Sampling sampling = Sampling::LogUniform);

// ---------------------------------------------------------------------------
// Channel-wise random gamma correction

inline constexpr Range kDefaultGammaRange{0.33, 3.0};

struct CwrgcParams {
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
};

/// Raises each channel to its own exponent: out_c = in_c ^ gamma_c.
FloatRgb cwrgc(const FloatRgb& img, const CwrgcParams& params);
RgbImage cwrgc(const RgbImage& img, const CwrgcParams& params);

/// Three independent draws, in R, G, B order.
CwrgcParams sample_cwrgc(RngStream& rng, Range range = kDefaultGammaRange,
                         Sampling sampling = Sampling::LogUniform);

// ---------------------------------------------------------------------------
// Channel-wise random vessel augmentation

struct CwrvaParams {
  std::array<double, 3> lambda{0.0, 0.0, 0.0};
  double disturb = 0.0;  // normalized, [0,1]
  int num_angles = kDefaultNumAngles;
  int length = kDefaultSeLength;
  SourcePlane source = SourcePlane::InvertedGreen;
};

/// Per-channel vessel weights M_c = vessel_map * lambda_c.
struct AttentionMap {
  std::array<FloatPlane, 3> channels;
  const FloatPlane& operator[](Channel c) const { return channels[static_cast<int>(c)]; }
};

AttentionMap attention_map(const FloatRgb& img, const CwrvaParams& params,
                           const StructuringElementBank& bank);
AttentionMap attention_map(const FloatRgb& img, const CwrvaParams& params);

/// out_c = in_c * (1 - M_c) + M_c * disturb.
FloatRgb cwrva(const FloatRgb& img, const AttentionMap& map, double disturb);
RgbImage cwrva(const RgbImage& img, const AttentionMap& map, double disturb);

/// Independent uniform lambda per channel, one shared disturbing intensity.
CwrvaParams sample_cwrva(RngStream& rng, Range lambda_range = {0.0, 1.0},
                         Range disturb_range = {0.0, 1.0});

// ---------------------------------------------------------------------------
// Baselines

inline constexpr double kDefaultNoiseSigma = 20.0 / 255.0;
inline constexpr Range kDefaultSvgcRange{0.25, 4.0};

/// Adds independent N(0, sigma^2) noise to every sample, then clamps.
FloatRgb rgn(const FloatRgb& img, RngStream& rng, double sigma = kDefaultNoiseSigma);

struct Hsv {
  double h = 0.0;  // [0,1)
  double s = 0.0;
  double v = 0.0;
};

Hsv rgb_to_hsv(double r, double g, double b);
std::array<double, 3> hsv_to_rgb(const Hsv& hsv);

/// Gamma on saturation and value in HSV space, fixed exponents.
FloatRgb svgc_apply(const FloatRgb& img, double s_gamma, double v_gamma);

struct SvgcDraw {
  double s_gamma = 1.0;
  double v_gamma = 1.0;
};

SvgcDraw sample_svgc(RngStream& rng, Range range = kDefaultSvgcRange,
                     Sampling sampling = Sampling::LogUniform);
FloatRgb svgc(const FloatRgb& img, RngStream& rng, Range range = kDefaultSvgcRange,
              Sampling sampling = Sampling::LogUniform);

// ---------------------------------------------------------------------------
// Geometry with paired masks

struct FlipDecision {
  bool horizontal = false;
  bool vertical = false;
};

/// Image plus the masks that must follow it through geometric stages.
struct Sample {
  FloatRgb image;
  std::vector<BinaryPlane> masks;
};

FlipDecision sample_flips(RngStream& rng, double p);
Sample apply_flips(Sample sample, FlipDecision d);
Sample random_flips(Sample sample, RngStream& rng, double p = 0.5);

// ---------------------------------------------------------------------------
// Pipeline

/// Stage order is fixed: flips, RGN, SVGC, CWRGC, CWRVA. The values are the
/// substream indices of each stage.
enum class Stage : std::uint64_t { Flips = 0, Rgn = 1, Svgc = 2, Cwrgc = 3, Cwrva = 4 };

struct AugmentationConfig {
  struct Flips {
    bool enabled = true;
    double probability = 0.5;
  } flips;
  struct Rgn {
    bool enabled = false;
    double sigma = kDefaultNoiseSigma;
  } rgn;
  struct Svgc {
    bool enabled = false;
    Range range = kDefaultSvgcRange;
    Sampling sampling = Sampling::LogUniform;
  } svgc;
  struct Cwrgc {
    bool enabled = true;
    Range range = kDefaultGammaRange;
    Sampling sampling = Sampling::LogUniform;
  } cwrgc;
  struct Cwrva {
    bool enabled = true;
    Range lambda_range{0.0, 1.0};
    Range disturb_range{0.0, 1.0};
    int num_angles = kDefaultNumAngles;
    int length = kDefaultSeLength;
    SourcePlane source = SourcePlane::InvertedGreen;
  } cwrva;
  int samples_per_image = 1;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;

  /// Every stage disabled.
  static AugmentationConfig none();
};

/// What was drawn for one output sample.
struct AppliedParams {
  FlipDecision flips;
  bool rgn = false;
  SvgcDraw svgc;
  bool svgc_applied = false;
  CwrgcParams cwrgc;
  bool cwrgc_applied = false;
  std::array<double, 3> lambda{0.0, 0.0, 0.0};
  double disturb = 0.0;
  bool cwrva_applied = false;
};

struct AugmentedSample {
  RgbImage image;
  std::vector<BinaryPlane> masks;
  AppliedParams params;
};

/// Produces config.samples_per_image outputs for one input. Output k of image
/// `image_index` depends only on (rng.seed(), config, image_index, k, input).
std::vector<AugmentedSample> apply_pipeline(const RgbImage& img,
                                            const std::vector<BinaryPlane>& masks,
                                            const AugmentationConfig& config,
                                            const RngStream& rng, std::uint64_t image_index);

}  // namespace vesselaug
