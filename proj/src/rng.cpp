#include "vesselaug/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vesselaug {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double RngStream::log_uniform(double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("log_uniform: need 0 < lo <= hi");
  }
  if (lo == hi) return lo;
  return std::clamp(std::exp(uniform(std::log(lo), std::log(hi))), lo, hi);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

RngStream RngStream::substream(std::initializer_list<std::uint64_t> path) const {
  std::uint64_t h = mix64(seed_);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return RngStream(h);
}

}  // namespace vesselaug
