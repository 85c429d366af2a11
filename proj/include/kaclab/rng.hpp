#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kaclab {

/// Random stream used throughout. Every stream is derived from a 64-bit
/// master seed plus a (tag, index) pair, so replicate r of a command draws the
/// same numbers no matter how many replicates or threads there are.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  double angle();
  double normal() { return normal_(engine_); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index);

/// Stable 64-bit tag for a command or experiment name (FNV-1a).
std::uint64_t tag_of(std::string_view name);

inline Rng make_stream(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return Rng(mix_seed(master, tag, index));
}

inline Rng make_stream(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  return Rng(mix_seed(master, tag_of(tag), index));
}

}  // namespace kaclab
