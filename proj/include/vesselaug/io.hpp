#pragma once

#include "vesselaug/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>

namespace vesselaug {

namespace fs = std::filesystem;

/// 8-bit PNG. Gray and palette sources are promoted to three equal channels.
/// 16-bit sources and sources with an alpha channel are rejected (DataError).
RgbImage load_image(const fs::path& path);
void save_image(const RgbImage& img, const fs::path& path);

struct MaskLoad {
  BinaryPlane mask;
  /// Samples that were neither 0 nor the maximum value.
  std::size_t non_extremal = 0;
};

/// Single-channel raster thresholded at half range (8-bit: > 127 is 1).
/// Colour files are accepted only when all channels agree at every pixel.
MaskLoad load_binary_mask(const fs::path& path);
/// Writes 0/255 8-bit gray.
void save_binary_mask(const BinaryPlane& mask, const fs::path& path);

void save_gray(const Plane<std::uint8_t>& plane, const fs::path& path);

/// p = stored / (2^bits - 1). bits is 8 or 16.
void save_probability_map(const FloatPlane& p, const fs::path& path, int bits = 16);
FloatPlane load_probability_map(const fs::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes);
void copy_file_atomic(const fs::path& from, const fs::path& to);

/// Writes `img`, or copies `source_path` verbatim when `img` is pixel-equal
/// to `source`, so untouched rasters stay byte-identical to their origin.
void save_image_or_copy(const RgbImage& img, const RgbImage& source,
                        const fs::path& source_path, const fs::path& path);

}  // namespace vesselaug
