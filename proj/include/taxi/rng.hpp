#pragma once

#include <cstdint>

namespace taxi {

// Counter-based splittable PRNG (splitmix64). Streams derived with
// derive_stream(seed, a, b) are statistically independent, so parallel
// workers can draw from their own stream in any schedule order.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return (*this)() % n; }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Hash-derives an independent stream id from a root seed and two indices
// (typically hierarchy level and cluster index).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = detail::mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = detail::mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = detail::mix64(h ^ (b + 0x9e3779b97f4a7c15ULL));
  return h;
}

}  // namespace taxi
