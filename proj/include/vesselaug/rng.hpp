#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vesselaug {

/// SplitMix64 finalizer; used to derive substream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seeded deterministic random stream.
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The floating-point draws are computed here rather than through
/// <random> distributions, whose algorithms vary between standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// log-uniform on [lo, hi], lo > 0.
  double log_uniform(double lo, double hi);

  /// Standard normal via Box-Muller; one draw of the pair is cached.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent stream keyed by a path of indices, e.g. {image, sample, stage}.
  RngStream substream(std::initializer_list<std::uint64_t> path) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vesselaug
