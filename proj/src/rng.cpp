#include "kaclab/rng.hpp"

namespace kaclab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double Rng::angle() {
  // unit_ is [0,1); the product can still round up to 2pi.
  double theta = 6.283185307179586476925286766559 * unit_(engine_);
  return theta >= 6.283185307179586476925286766559 ? 0.0 : theta;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ tag) + index);
}

std::uint64_t tag_of(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace kaclab
