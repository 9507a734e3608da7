#include "vesselaug/morphology.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vesselaug {

int StructuringElement::radius() const {
  int r = 0;
  for (const auto& o : offsets) r = std::max({r, std::abs(o.dx), std::abs(o.dy)});
  return r;
}

namespace {

// Integer Bresenham from the origin to (x1, y1), inclusive of both ends.
std::vector<Offset> bresenham(int x1, int y1) {
  std::vector<Offset> pts;
  const int adx = std::abs(x1);
  const int ady = std::abs(y1);
  const int sx = x1 < 0 ? -1 : 1;
  const int sy = y1 < 0 ? -1 : 1;
  int x = 0;
  int y = 0;
  if (adx >= ady) {
    int err = 2 * ady - adx;
    for (int i = 0; i <= adx; ++i) {
      pts.push_back({x, y});
      if (err > 0) {
        y += sy;
        err -= 2 * adx;
      }
      err += 2 * ady;
      x += sx;
    }
  } else {
    int err = 2 * adx - ady;
    for (int i = 0; i <= ady; ++i) {
      pts.push_back({x, y});
      if (err > 0) {
        x += sx;
        err -= 2 * ady;
      }
      err += 2 * adx;
      y += sy;
    }
  }
  return pts;
}

}  // namespace

StructuringElement make_line_element(double angle, int length) {
  if (length < 3 || length % 2 == 0) {
    throw std::invalid_argument("structuring element length must be odd and >= 3, got " +
                                std::to_string(length));
  }
  const int half = (length - 1) / 2;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  // Endpoint on the Chebyshev ring of radius `half` so the half-line has
  // exactly half+1 pixels.
  const double m = std::max(std::abs(c), std::abs(s));
  const int ex = static_cast<int>(std::lround(half * c / m));
  const int ey = static_cast<int>(std::lround(-half * s / m));

  StructuringElement se;
  se.angle = angle;
  se.length = length;
  const auto half_line = bresenham(ex, ey);
  se.offsets.reserve(length);
  for (auto it = half_line.rbegin(); it != half_line.rend() - 1; ++it) {
    se.offsets.push_back({-it->dx, -it->dy});
  }
  se.offsets.insert(se.offsets.end(), half_line.begin(), half_line.end());
  return se;
}

StructuringElementBank build_se_bank(int num_angles, int length) {
  if (num_angles < 1) {
    throw std::invalid_argument("num_angles must be >= 1, got " + std::to_string(num_angles));
  }
  StructuringElementBank bank;
  bank.num_angles = num_angles;
  bank.length = length;
  bank.elements.reserve(num_angles);
  for (int k = 0; k < num_angles; ++k) {
    bank.elements.push_back(make_line_element(k * std::numbers::pi / num_angles, length));
  }
  return bank;
}

std::string_view to_string(SourcePlane s) {
  switch (s) {
    case SourcePlane::InvertedGreen:
      return "inverted_green";
    case SourcePlane::InvertedGray:
      return "inverted_gray";
  }
  return "inverted_green";
}

SourcePlane parse_source_plane(std::string_view s) {
  if (s == "inverted_green") return SourcePlane::InvertedGreen;
  if (s == "inverted_gray") return SourcePlane::InvertedGray;
  throw std::invalid_argument("unknown source plane '" + std::string(s) +
                              "' (expected inverted_green or inverted_gray)");
}

FloatPlane vessel_source(const FloatRgb& img, SourcePlane source) {
  switch (source) {
    case SourcePlane::InvertedGreen:
      return 1.0 - img[Channel::G];
    case SourcePlane::InvertedGray:
      return 1.0 - rgb_to_gray(img);
  }
  return 1.0 - img[Channel::G];
}

FloatPlane vessel_map(const FloatRgb& img, const StructuringElementBank& bank,
                      SourcePlane source) {
  return normalize_minmax(top_hat_sum(vessel_source(img, source), bank));
}

}  // namespace vesselaug
