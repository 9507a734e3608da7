#include "vesselaug/image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vesselaug {

RgbImage::RgbImage(int width, int height)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * height * 3, 0) {
  if (width < 0 || height < 0) throw std::invalid_argument("RgbImage: negative dimension");
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw std::invalid_argument("RgbImage: negative dimension");
  if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw std::invalid_argument("RgbImage: data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height) + "x3");
  }
}

FloatRgb normalize(const RgbImage& img) {
  FloatRgb out;
  for (auto& ch : out.channels) ch.resize(img.height(), img.width());
  const auto& d = img.data();
  std::size_t i = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.channels[c](y, x) = d[i++] / 255.0;
    }
  }
  return out;
}

std::uint8_t quantize(double v) {
  // std::round rounds half away from zero.
  return static_cast<std::uint8_t>(std::round(v * 255.0));
}

RgbImage to_rgb_image(const FloatRgb& planes) {
  const int w = planes.width();
  const int h = planes.height();
  for (const auto& ch : planes.channels) {
    if (ch.rows() != h || ch.cols() != w) {
      throw std::invalid_argument("to_rgb_image: channel dimensions differ");
    }
  }
  const FloatRgb clamped = clamp01(planes);
  RgbImage out(w, h);
  auto& d = out.data();
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) d[i++] = quantize(clamped.channels[c](y, x));
    }
  }
  return out;
}

Plane<std::uint8_t> quantize_plane(const FloatPlane& plane) {
  const FloatPlane clamped = clamp01(plane);
  return clamped.unaryExpr([](double v) { return quantize(v); });
}

RgbImage flip_horizontal(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (Channel c : kChannels) out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

RgbImage flip_vertical(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (Channel c : kChannels) out.at(x, img.height() - 1 - y, c) = img.at(x, y, c);
    }
  }
  return out;
}

}  // namespace vesselaug
