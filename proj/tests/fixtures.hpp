#pragma once

#include "vesselaug/image.hpp"
#include "vesselaug/io.hpp"
#include "vesselaug/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

namespace fs = std::filesystem;
using namespace vesselaug;

inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline FloatPlane random_plane(std::mt19937_64& g, int h, int w, int levels = 0) {
  FloatPlane p(h, w);
  for (long i = 0; i < p.size(); ++i) {
    // levels > 0 forces heavy ties.
    p.data()[i] = levels > 0 ? std::floor(unit(g) * levels) / levels : unit(g);
  }
  return p;
}

inline RgbImage random_image(std::mt19937_64& g, int w, int h) {
  RgbImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(g() & 0xff);
  return img;
}

inline RgbImage uniform_image(int w, int h, std::uint8_t r, std::uint8_t gr, std::uint8_t b) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y, Channel::R) = r;
      img.at(x, y, Channel::G) = gr;
      img.at(x, y, Channel::B) = b;
    }
  }
  return img;
}

struct Fundus {
  RgbImage image;
  BinaryPlane truth;
  BinaryPlane fov;
};

/// Procedural colour fundus photograph: dark surround, circular field of
/// view, orange-red background with vignetting, a bright optic disc and a
/// tree of dark vessels of decreasing width. Default size matches DRIVE.
inline Fundus synthetic_fundus(std::uint64_t seed = 7, int w = 565, int h = 584) {
  std::mt19937_64 g(seed);
  Fundus f;
  f.image = RgbImage(w, h);
  f.truth = BinaryPlane::Zero(h, w);
  f.fov = BinaryPlane::Zero(h, w);
  const double cx = w / 2.0, cy = h / 2.0;
  const double radius = 0.47 * std::min(w, h);
  const double disc_x = cx + 0.3 * radius, disc_y = cy - 0.05 * radius;
  const double disc_r = 0.12 * radius;

  // Vessel tree as thick polylines grown from the disc.
  struct Seg {
    double x, y, angle, width;
    int depth;
  };
  std::vector<Seg> stack;
  for (int k = 0; k < 4; ++k) {
    stack.push_back({disc_x, disc_y, std::numbers::pi * (0.5 * k + 0.25), 5.0, 0});
  }
  FloatPlane vessel_depth = FloatPlane::Zero(h, w);
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    const int steps = static_cast<int>(radius * (0.35 + 0.2 * unit(g)));
    for (int i = 0; i < steps; ++i) {
      s.angle += (unit(g) - 0.5) * 0.12;
      s.x += std::cos(s.angle);
      s.y += std::sin(s.angle);
      const int r = static_cast<int>(std::ceil(s.width / 2));
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int px = static_cast<int>(std::lround(s.x)) + dx;
          const int py = static_cast<int>(std::lround(s.y)) + dy;
          if (px < 0 || py < 0 || px >= w || py >= h) continue;
          if (dx * dx + dy * dy > (s.width / 2) * (s.width / 2) + 0.25) continue;
          f.truth(py, px) = 1;
          vessel_depth(py, px) = std::max(vessel_depth(py, px), 0.25 + 0.06 * s.width);
        }
      }
      if (s.depth < 3 && i > 20 && unit(g) < 0.012) {
        stack.push_back({s.x, s.y, s.angle + (unit(g) < 0.5 ? 0.6 : -0.6),
                         std::max(1.0, s.width * 0.7), s.depth + 1});
      }
    }
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = std::hypot(x - cx, y - cy);
      if (d > radius) {
        f.truth(y, x) = 0;
        for (Channel c : kChannels) f.image.at(x, y, c) = static_cast<std::uint8_t>(g() % 4);
        continue;
      }
      f.fov(y, x) = 1;
      const double vignette = 1.0 - 0.45 * std::pow(d / radius, 2.0);
      const double disc = std::exp(-std::pow(std::hypot(x - disc_x, y - disc_y) / disc_r, 2.0));
      double r = 0.78 * vignette + 0.2 * disc;
      double gr = 0.36 * vignette + 0.45 * disc;
      double b = 0.12 * vignette + 0.25 * disc;
      const double dark = 1.0 - vessel_depth(y, x);
      r *= 0.85 + 0.15 * dark;
      gr *= dark;
      b *= dark;
      const double noise = (unit(g) - 0.5) * 0.02;
      f.image.at(x, y, Channel::R) = quantize(std::clamp(r + noise, 0.0, 1.0));
      f.image.at(x, y, Channel::G) = quantize(std::clamp(gr + noise, 0.0, 1.0));
      f.image.at(x, y, Channel::B) = quantize(std::clamp(b + noise, 0.0, 1.0));
    }
  }
  return f;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("vesselaug-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

inline std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative path -> bytes for every regular file under root.
inline std::map<std::string, std::vector<std::uint8_t>> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_bytes(e.path());
  }
  return out;
}

/// Writes `count` synthetic fundus images with truth and FOV masks plus a
/// manifest; returns the manifest path.
inline fs::path write_toy_dataset(const fs::path& dir, int count, int w = 48, int h = 40) {
  DatasetManifest m{dir, {}};
  for (int i = 0; i < count; ++i) {
    const Fundus f = synthetic_fundus(100 + i, w, h);
    const std::string id = "img" + std::to_string(i);
    save_image(f.image, dir / "images" / (id + ".png"));
    save_binary_mask(f.truth, dir / "truth" / (id + ".png"));
    save_binary_mask(f.fov, dir / "fov" / (id + ".png"));
    m.entries.push_back({id, fs::path("images") / (id + ".png"), fs::path("truth") / (id + ".png"),
                         fs::path("fov") / (id + ".png")});
  }
  save_manifest(m, dir / "manifest.jsonl");
  return dir / "manifest.jsonl";
}

}  // namespace fixtures
