#include "vesselaug/io.hpp"

#include "vesselaug/errors.hpp"

#include <fmt/format.h>
#include <png.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace vesselaug {

namespace {

struct RawRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  bool alpha = false;
  std::vector<std::uint16_t> samples;  // interleaved
};

struct MemoryReader {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes->size()) png_error(png, "unexpected end of file");
  std::memcpy(out, r->bytes->data() + r->pos, len);
  r->pos += len;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void flush_noop(png_structp) {}

struct ErrorSink {
  char message[256] = {};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof sink->message, "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("read failed for '{}'", path.string()));
  return bytes;
}

// Row buffers live in `scratch`, outside this frame, so a longjmp from libpng
// never leaves a half-modified local behind.
struct Scratch {
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
};

bool decode_png(const std::vector<std::uint8_t>* bytes, RawRaster* out, Scratch* scratch,
                ErrorSink* sink) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, sink, on_png_error,
                                           on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  MemoryReader reader{bytes, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, read_from_memory);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  out->width = static_cast<int>(png_get_image_width(png, info));
  out->height = static_cast<int>(png_get_image_height(png, info));
  out->channels = png_get_channels(png, info);
  out->bit_depth = png_get_bit_depth(png, info);
  out->alpha = (png_get_color_type(png, info) & PNG_COLOR_MASK_ALPHA) != 0;

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  scratch->buffer.resize(rowbytes * out->height);
  scratch->rows.resize(out->height);
  for (int y = 0; y < out->height; ++y) scratch->rows[y] = scratch->buffer.data() + rowbytes * y;
  png_read_image(png, scratch->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

RawRaster read_png(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw IoError(fmt::format("'{}' is not a PNG file", path.string()));
  }
  RawRaster raster;
  Scratch scratch;
  ErrorSink sink;
  if (!decode_png(&bytes, &raster, &scratch, &sink)) {
    throw IoError(fmt::format("cannot decode '{}': {}", path.string(),
                              sink.message[0] ? sink.message : "libpng failure"));
  }
  if (raster.width == 0 || raster.height == 0) {
    throw IoError(fmt::format("'{}' has a zero dimension", path.string()));
  }
  const std::size_t per_row = static_cast<std::size_t>(raster.width) * raster.channels;
  raster.samples.resize(per_row * raster.height);
  for (int y = 0; y < raster.height; ++y) {
    const png_byte* row = scratch.rows[y];
    std::uint16_t* dst = raster.samples.data() + per_row * y;
    for (std::size_t i = 0; i < per_row; ++i) {
      // 16-bit PNG samples are big-endian.
      dst[i] = raster.bit_depth == 16
                   ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1])
                   : row[i];
    }
  }
  return raster;
}

bool encode_png(const RawRaster* raster, std::vector<png_byte>* row,
                std::vector<std::uint8_t>* out, ErrorSink* sink) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, sink, on_png_error,
                                            on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, write_to_memory, flush_noop);
  png_set_IHDR(png, info, raster->width, raster->height, raster->bit_depth,
               raster->channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const bool wide = raster->bit_depth == 16;
  const std::size_t per_row = static_cast<std::size_t>(raster->width) * raster->channels;
  for (int y = 0; y < raster->height; ++y) {
    const std::uint16_t* src = raster->samples.data() + per_row * y;
    for (std::size_t i = 0; i < per_row; ++i) {
      if (wide) {
        (*row)[2 * i] = static_cast<png_byte>(src[i] >> 8);
        (*row)[2 * i + 1] = static_cast<png_byte>(src[i] & 0xff);
      } else {
        (*row)[i] = static_cast<png_byte>(src[i]);
      }
    }
    png_write_row(png, row->data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_png(const RawRaster& raster, const fs::path& path) {
  std::vector<std::uint8_t> bytes;
  std::vector<png_byte> row(static_cast<std::size_t>(raster.width) * raster.channels *
                            (raster.bit_depth == 16 ? 2 : 1));
  ErrorSink sink;
  if (!encode_png(&raster, &row, &bytes, &sink)) {
    throw IoError(fmt::format("cannot encode '{}': {}", path.string(), sink.message));
  }
  write_file_atomic(path, bytes);
}

std::atomic<unsigned> temp_counter{0};

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = fs::path(path).concat(
      fmt::format(".tmp.{}.{}", static_cast<long>(::getpid()), temp_counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError(fmt::format("write failed for '{}'", tmp.string()));
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(fmt::format("cannot move into place '{}'", path.string()));
  }
}

void copy_file_atomic(const fs::path& from, const fs::path& to) {
  write_file_atomic(to, read_file(from));
}

RgbImage load_image(const fs::path& path) {
  const RawRaster raw = read_png(path);
  if (raw.bit_depth != 8) {
    throw DataError(fmt::format("'{}': {}-bit samples are not supported for colour input "
                                "(expected 8-bit)",
                                path.string(), raw.bit_depth));
  }
  if (raw.alpha) {
    throw DataError(fmt::format("'{}': alpha channels are not supported", path.string()));
  }
  RgbImage img(raw.width, raw.height);
  auto& d = img.data();
  const std::size_t pixels = static_cast<std::size_t>(raw.width) * raw.height;
  for (std::size_t i = 0; i < pixels; ++i) {
    for (int c = 0; c < 3; ++c) {
      d[i * 3 + c] = static_cast<std::uint8_t>(
          raw.samples[i * raw.channels + (raw.channels == 3 ? c : 0)]);
    }
  }
  return img;
}

void save_image(const RgbImage& img, const fs::path& path) {
  if (img.empty()) throw DataError(fmt::format("refusing to write empty image '{}'", path.string()));
  RawRaster raw;
  raw.width = img.width();
  raw.height = img.height();
  raw.channels = 3;
  raw.bit_depth = 8;
  raw.samples.assign(img.data().begin(), img.data().end());
  write_png(raw, path);
}

MaskLoad load_binary_mask(const fs::path& path) {
  const RawRaster raw = read_png(path);
  const int colour_channels = raw.alpha ? raw.channels - 1 : raw.channels;
  const std::uint32_t max_value = (1u << raw.bit_depth) - 1;
  MaskLoad out;
  out.mask.resize(raw.height, raw.width);
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * raw.width + x) * raw.channels;
      const std::uint32_t v = raw.samples[base];
      for (int c = 1; c < colour_channels; ++c) {
        if (raw.samples[base + c] != v) {
          throw DataError(fmt::format(
              "'{}': mask channels disagree at pixel ({}, {})", path.string(), x, y));
        }
      }
      if (v != 0 && v != max_value) ++out.non_extremal;
      out.mask(y, x) = 2 * v > max_value ? 1 : 0;
    }
  }
  return out;
}

void save_binary_mask(const BinaryPlane& mask, const fs::path& path) {
  if ((mask > 1).any()) throw DataError(fmt::format("'{}': mask is not binary", path.string()));
  const Plane<std::uint8_t> gray = mask * std::uint8_t{255};
  save_gray(gray, path);
}

void save_gray(const Plane<std::uint8_t>& plane, const fs::path& path) {
  if (plane.size() == 0) throw DataError(fmt::format("refusing to write empty raster '{}'", path.string()));
  RawRaster raw;
  raw.width = static_cast<int>(plane.cols());
  raw.height = static_cast<int>(plane.rows());
  raw.channels = 1;
  raw.bit_depth = 8;
  raw.samples.assign(plane.data(), plane.data() + plane.size());
  write_png(raw, path);
}

void save_probability_map(const FloatPlane& p, const fs::path& path, int bits) {
  if (bits != 8 && bits != 16) throw std::invalid_argument("probability maps are 8 or 16 bit");
  if (p.size() == 0) throw DataError(fmt::format("refusing to write empty raster '{}'", path.string()));
  if (!(p >= 0.0).all() || !(p <= 1.0).all()) {
    throw DataError(fmt::format("'{}': probabilities outside [0,1]", path.string()));
  }
  const double scale = bits == 16 ? 65535.0 : 255.0;
  RawRaster raw;
  raw.width = static_cast<int>(p.cols());
  raw.height = static_cast<int>(p.rows());
  raw.channels = 1;
  raw.bit_depth = bits;
  raw.samples.resize(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    raw.samples[i] = static_cast<std::uint16_t>(std::round(p.data()[i] * scale));
  }
  write_png(raw, path);
}

FloatPlane load_probability_map(const fs::path& path) {
  const RawRaster raw = read_png(path);
  if (raw.channels != 1) {
    throw DataError(fmt::format("'{}': probability maps must be single-channel", path.string()));
  }
  const double scale = raw.bit_depth == 16 ? 65535.0 : 255.0;
  FloatPlane out(raw.height, raw.width);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = raw.samples[i] / scale;
  return out;
}

void save_image_or_copy(const RgbImage& img, const RgbImage& source, const fs::path& source_path,
                        const fs::path& path) {
  if (img == source) {
    copy_file_atomic(source_path, path);
  } else {
    save_image(img, path);
  }
}

}  // namespace vesselaug
