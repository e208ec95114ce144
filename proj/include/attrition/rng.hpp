#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace attrition {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Identifies one reproducible random stream. Identical (seed, stream_id)
// always yields the identical draw sequence, independent of how many other
// streams exist, so per-path streams can be consumed in any order or in
// parallel.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  RngStream substream(std::uint64_t offset) const {
    return RngStream{seed, stream_id + offset};
  }
};

// mt19937_64 seeded from a splitmix64 hash of (seed, stream_id), with all
// non-uniform draws built from explicit transforms (Box-Muller, inverse CDF)
// rather than std::*_distribution, whose algorithms are not pinned by the
// standard.
class StreamRng {
 public:
  explicit StreamRng(const RngStream& s) {
    std::uint64_t st = s.seed;
    std::uint64_t a = splitmix64(st);
    st = a ^ (0x9e3779b97f4a7c15ULL * (s.stream_id + 1));
    eng_.seed(splitmix64(st));
  }

  // uniform on (0,1), never 0 or 1
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  // one Box-Muller pair of independent standard normals
  std::pair<double, double> normal_pair() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.14159265358979323846 * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
  }

  // unit-rate exponential
  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace attrition
