#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vesselaug {

/// Single-channel raster, rows = height, cols = width.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using FloatPlane = Plane<double>;
/// 0/1 valued plane used for ground truth and field-of-view masks.
using BinaryPlane = Plane<std::uint8_t>;

enum class Channel : int { R = 0, G = 1, B = 2 };

inline constexpr std::array<Channel, 3> kChannels{Channel::R, Channel::G, Channel::B};

/// 8-bit interleaved RGB raster. All processing happens on RgbPlanes; this is
/// the storage/I/O form.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t& at(int x, int y, Channel c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + static_cast<int>(c)];
  }
  std::uint8_t at(int x, int y, Channel c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + static_cast<int>(c)];
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Normalized three-channel view: every value nominally in [0,1].
template <typename Scalar>
struct RgbPlanes {
  std::array<Plane<Scalar>, 3> channels;

  Plane<Scalar>& operator[](Channel c) { return channels[static_cast<int>(c)]; }
  const Plane<Scalar>& operator[](Channel c) const { return channels[static_cast<int>(c)]; }

  int width() const { return static_cast<int>(channels[0].cols()); }
  int height() const { return static_cast<int>(channels[0].rows()); }
};

using FloatRgb = RgbPlanes<double>;

// ---------------------------------------------------------------------------
// Conversions

/// s / 255 for every sample.
FloatRgb normalize(const RgbImage& img);

/// round(v * 255) with ties away from zero. Input must already be in [0,1].
std::uint8_t quantize(double v);

/// Clamps then quantizes every channel. Throws on NaN.
RgbImage to_rgb_image(const FloatRgb& planes);

/// 8-bit gray raster from a plane in [0,1] (values clamped first).
Plane<std::uint8_t> quantize_plane(const FloatPlane& plane);

// ---------------------------------------------------------------------------
// Pixel-wise helpers

template <typename Scalar>
constexpr Scalar kLumaR = Scalar(0.299);
template <typename Scalar>
constexpr Scalar kLumaG = Scalar(0.587);
template <typename Scalar>
constexpr Scalar kLumaB = Scalar(0.114);

/// BT.601 luma on normalized channels.
template <typename Scalar>
Plane<Scalar> rgb_to_gray(const RgbPlanes<Scalar>& img) {
  return kLumaR<Scalar> * img[Channel::R] + kLumaG<Scalar> * img[Channel::G] +
         kLumaB<Scalar> * img[Channel::B];
}

inline FloatPlane rgb_to_gray(const RgbImage& img) { return rgb_to_gray(normalize(img)); }

template <typename Scalar>
Scalar mean_gray(const RgbPlanes<Scalar>& img) {
  if (img.width() == 0 || img.height() == 0) {
    throw std::invalid_argument("mean_gray: empty image");
  }
  return rgb_to_gray(img).mean();
}

inline double mean_gray(const RgbImage& img) {
  if (img.empty()) throw std::invalid_argument("mean_gray: empty image");
  return mean_gray(normalize(img));
}

template <typename Derived>
Plane<typename Derived::Scalar> clamp01(const Eigen::ArrayBase<Derived>& plane) {
  using Scalar = typename Derived::Scalar;
  if (plane.isNaN().any()) throw std::invalid_argument("clamp01: NaN input");
  return plane.max(Scalar(0)).min(Scalar(1));
}

template <typename Scalar>
RgbPlanes<Scalar> clamp01(const RgbPlanes<Scalar>& img) {
  RgbPlanes<Scalar> out;
  for (int c = 0; c < 3; ++c) out.channels[c] = clamp01(img.channels[c]);
  return out;
}

// ---------------------------------------------------------------------------
// Geometry

template <typename Scalar>
Plane<Scalar> flip_horizontal(const Plane<Scalar>& p) {
  return p.rowwise().reverse();
}

template <typename Scalar>
Plane<Scalar> flip_vertical(const Plane<Scalar>& p) {
  return p.colwise().reverse();
}

template <typename Scalar>
RgbPlanes<Scalar> flip_horizontal(const RgbPlanes<Scalar>& img) {
  RgbPlanes<Scalar> out;
  for (int c = 0; c < 3; ++c) out.channels[c] = flip_horizontal(img.channels[c]);
  return out;
}

template <typename Scalar>
RgbPlanes<Scalar> flip_vertical(const RgbPlanes<Scalar>& img) {
  RgbPlanes<Scalar> out;
  for (int c = 0; c < 3; ++c) out.channels[c] = flip_vertical(img.channels[c]);
  return out;
}

RgbImage flip_horizontal(const RgbImage& img);
RgbImage flip_vertical(const RgbImage& img);

/// Fills all three channels with the same plane.
template <typename Scalar>
RgbPlanes<Scalar> replicate(const Plane<Scalar>& gray) {
  return RgbPlanes<Scalar>{{gray, gray, gray}};
}

}  // namespace vesselaug
