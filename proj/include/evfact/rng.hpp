#ifndef EVFACT_RNG_HPP
#define EVFACT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace evfact {

// 64-bit finalizer from the splitmix64 reference implementation
// (Steele/Lea/Flood's SplittableRandom, Vigna's constants). Bijective, so
// distinct inputs never collide.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// FNV-1a, used to fold string keys into seed material.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h + 0x9E3779B97F4A7C15ull + v);
}

// Counter-style generator: state advances by a fixed odd constant and each
// output is mix64 of the counter, i.e. splitmix64. Every draw consumes a
// fixed number of counter steps, which keeps streams reproducible across
// platforms and makes independently-seeded streams cheap.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // 1.0 with probability p (columns are stored as doubles).
  double bernoulli(double p) { return next_unit() < p ? 1.0 : 0.0; }

  // Box-Muller, cosine branch only: exactly two uniforms per draw, no cached
  // spare, so the stream position never depends on call history.
  double normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));  // 1-u1 in (0,1]
    return radius * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t state_;
};

}  // namespace evfact

#endif
