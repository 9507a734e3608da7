#pragma once

#include "vesselaug/image.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string_view>
#include <vector>

namespace vesselaug {

struct Offset {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
  friend auto operator<=>(const Offset&, const Offset&) = default;
};

/// Flat line segment centred at the origin. dy grows downwards (image rows).
struct StructuringElement {
  std::vector<Offset> offsets;
  double angle = 0.0;
  int length = 0;

  /// Largest |dx| or |dy| among the offsets.
  int radius() const;
};

struct StructuringElementBank {
  std::vector<StructuringElement> elements;
  int num_angles = 0;
  int length = 0;
};

inline constexpr int kDefaultNumAngles = 12;
inline constexpr int kDefaultSeLength = 15;

/// Rasterizes a centred line of `length` pixels at `angle` radians with
/// Bresenham's algorithm. The angle is measured counter-clockwise from the
/// +x axis with y pointing up, so a positive angle yields negative dy.
StructuringElement make_line_element(double angle, int length);

/// num_angles elements at k*pi/num_angles. length must be odd and >= 3.
StructuringElementBank build_se_bank(int num_angles, int length);

namespace detail {

template <typename Scalar>
Plane<Scalar> pad_replicate(const Plane<Scalar>& p, int r) {
  const Eigen::Index h = p.rows();
  const Eigen::Index w = p.cols();
  Plane<Scalar> padded(h + 2 * r, w + 2 * r);
  padded.block(r, r, h, w) = p;
  for (int i = 0; i < r; ++i) {
    padded.block(r, i, h, 1) = p.col(0);
    padded.block(r, r + w + i, h, 1) = p.col(w - 1);
  }
  for (int i = 0; i < r; ++i) {
    padded.row(i) = padded.row(r);
    padded.row(r + h + i) = padded.row(r + h - 1);
  }
  return padded;
}

template <bool kMin, typename Scalar>
Plane<Scalar> rank_filter(const Plane<Scalar>& p, const StructuringElement& se) {
  if (p.size() == 0 || se.offsets.empty()) return p;
  const int r = se.radius();
  const Plane<Scalar> padded = pad_replicate(p, r);
  const Eigen::Index h = p.rows();
  const Eigen::Index w = p.cols();
  Plane<Scalar> out = padded.block(r + se.offsets[0].dy, r + se.offsets[0].dx, h, w);
  for (std::size_t k = 1; k < se.offsets.size(); ++k) {
    const auto& o = se.offsets[k];
    if constexpr (kMin) {
      out = out.min(padded.block(r + o.dy, r + o.dx, h, w));
    } else {
      out = out.max(padded.block(r + o.dy, r + o.dx, h, w));
    }
  }
  return out;
}

// Adjoint of the edge-replicated erosion: every window clamped onto the image
// pushes its value to the pixels it covers.
template <typename Scalar>
Plane<Scalar> adjoint_dilate(const Plane<Scalar>& p, const StructuringElement& se) {
  if (p.size() == 0 || se.offsets.empty()) return p;
  const int r = se.radius();
  const Eigen::Index h = p.rows();
  const Eigen::Index w = p.cols();
  Plane<Scalar> padded = Plane<Scalar>::Constant(h + 2 * r, w + 2 * r,
                                                 std::numeric_limits<Scalar>::lowest());
  for (const auto& o : se.offsets) {
    auto dst = padded.block(r + o.dy, r + o.dx, h, w);
    dst = dst.max(p);
  }
  for (int i = 0; i < r; ++i) {
    padded.row(r) = padded.row(r).max(padded.row(i));
    padded.row(r + h - 1) = padded.row(r + h - 1).max(padded.row(r + h + i));
  }
  for (int i = 0; i < r; ++i) {
    padded.col(r) = padded.col(r).max(padded.col(i));
    padded.col(r + w - 1) = padded.col(r + w - 1).max(padded.col(r + w + i));
  }
  return padded.block(r, r, h, w);
}

}  // namespace detail

// Out-of-range neighbours replicate the nearest edge sample.

template <typename Derived>
Plane<typename Derived::Scalar> erode(const Eigen::ArrayBase<Derived>& plane,
                                      const StructuringElement& se) {
  return detail::rank_filter<true>(Plane<typename Derived::Scalar>(plane), se);
}

template <typename Derived>
Plane<typename Derived::Scalar> dilate(const Eigen::ArrayBase<Derived>& plane,
                                       const StructuringElement& se) {
  return detail::rank_filter<false>(Plane<typename Derived::Scalar>(plane), se);
}

/// Erosion followed by its adjoint dilation. Away from the border this is
/// dilate(erode(p)); at the border each clamped window is treated as one
/// structuring set, which keeps the opening anti-extensive and idempotent.
template <typename Derived>
Plane<typename Derived::Scalar> open(const Eigen::ArrayBase<Derived>& plane,
                                     const StructuringElement& se) {
  return detail::adjoint_dilate(erode(plane, se), se);
}

/// White top-hat: plane minus its opening. Non-negative.
template <typename Derived>
Plane<typename Derived::Scalar> top_hat(const Eigen::ArrayBase<Derived>& plane,
                                        const StructuringElement& se) {
  return plane - open(plane, se);
}

/// Sum of top-hats over every element of the bank, accumulated in angle order.
template <typename Derived>
Plane<typename Derived::Scalar> top_hat_sum(const Eigen::ArrayBase<Derived>& plane,
                                            const StructuringElementBank& bank) {
  using Scalar = typename Derived::Scalar;
  if (bank.elements.empty()) throw std::invalid_argument("top_hat_sum: empty bank");
  const Plane<Scalar> input(plane);
  Plane<Scalar> sum = Plane<Scalar>::Zero(input.rows(), input.cols());
  for (const auto& se : bank.elements) sum += top_hat(input, se);
  return sum;
}

/// Affine rescale to [0,1]. A constant plane maps to all zeros.
template <typename Derived>
Plane<typename Derived::Scalar> normalize_minmax(const Eigen::ArrayBase<Derived>& plane) {
  using Scalar = typename Derived::Scalar;
  if (plane.size() == 0) return Plane<Scalar>(plane);
  const Scalar lo = plane.minCoeff();
  const Scalar hi = plane.maxCoeff();
  if (!(hi > lo)) return Plane<Scalar>::Zero(plane.rows(), plane.cols());
  return (plane - lo) / (hi - lo);
}

// ---------------------------------------------------------------------------
// Vessel response

/// Which plane is fed to the top-hat. Vessels are dark in fundus photographs,
/// so both options invert.
enum class SourcePlane { InvertedGreen, InvertedGray };

std::string_view to_string(SourcePlane s);
SourcePlane parse_source_plane(std::string_view s);

FloatPlane vessel_source(const FloatRgb& img, SourcePlane source);

/// normalize_minmax(top_hat_sum(vessel_source(img))): the rough vessel map.
FloatPlane vessel_map(const FloatRgb& img, const StructuringElementBank& bank,
                      SourcePlane source);

}  // namespace vesselaug
