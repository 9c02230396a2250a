#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace rtsched {

// Labeled deterministic random streams. A stream is identified by a 64-bit
// seed plus a purpose label ("traffic", "admission", "policy", ...); equal
// (seed, label) pairs replay the exact same draw sequence on any platform,
// distinct labels give independent streams. All bounded draws are produced
// from raw mt19937_64 words here instead of std::*_distribution, whose
// output is implementation-defined.
class RandomStream {
 public:
  RandomStream() : gen_(0) {}
  RandomStream(std::uint64_t seed, std::string_view label) : gen_(mix(seed, label)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound) without modulo bias.
  std::uint32_t next_below(std::uint32_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t threshold = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
    std::uint64_t x = gen_();
    while (x >= threshold) x = gen_();
    return static_cast<std::uint32_t>(x % bound);
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Index into `probs` by CDF inversion; assumes entries are nonnegative and
  // sum to ~1. Residual mass from rounding falls on the last entry.
  int sample_discrete(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("sample_discrete: empty distribution");
    const double u = next_double();
    double cdf = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      cdf += probs[i];
      if (u < cdf) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // Seed mixing: FNV-1a over the label, then splitmix64 finalization.
  static std::uint64_t mix(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : label) {
      h ^= c;
      h *= 1099511628211ull;
    }
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (h | 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rtsched
