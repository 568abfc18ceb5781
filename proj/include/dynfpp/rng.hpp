#ifndef DYNFPP_RNG_HPP
#define DYNFPP_RNG_HPP

#include <cmath>
#include <cstdint>

#include "lattice.hpp"

namespace dynfpp {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

// Uniform in the open interval (0,1); never 0 or 1.
constexpr double to_unit(std::uint64_t h) { return (double(h >> 11) + 0.5) * 0x1p-53; }

enum class Stream : std::uint64_t { Label = 1, Event = 2, Aux = 3 };

// Counter-based draws keyed by (seed, vertex, stream, ordinal).  Any vertex's
// randomness is independent of which other vertices are ever touched.
constexpr double keyed_uniform(std::uint64_t seed, Vertex v, Stream s, std::uint64_t ordinal) {
  std::uint64_t h = mix(seed, std::uint64_t(std::uint32_t(v.x)));
  h = mix(h, std::uint64_t(std::uint32_t(v.y)));
  h = mix(h, std::uint64_t(s));
  h = mix(h, ordinal);
  return to_unit(h);
}

inline double label_of(std::uint64_t seed, Vertex v, std::uint64_t ordinal = 0) {
  return keyed_uniform(seed, v, Stream::Label, ordinal);
}

// Seed of replica i (and sub-stream tag) under a root seed.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t i, std::uint64_t tag = 0) {
  return mix(mix(root, tag + 0x51ed), i);
}

// Small sequential generator for code that just needs a stream of numbers.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = state_;
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(z);
  }
  double uniform() { return to_unit(next()); }
  double exponential() { return -std::log(uniform()); }
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return std::uint64_t((unsigned __int128)next() * n >> 64); }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }
  result_type operator()() { return next(); }

 private:
  std::uint64_t state_;
};

}  // namespace dynfpp

#endif
