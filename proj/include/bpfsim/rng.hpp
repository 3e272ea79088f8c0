#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace bpfsim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Named random substream. Seeded from (master_seed, run_index, name) so a
// stream's draws depend only on its own consumption pattern: changing how one
// subsystem draws cannot perturb any other stream. mt19937_64 output and the
// derivations below are fully specified, so sequences are identical on every
// host.
class RngStream {
 public:
  RngStream() = default;

  RngStream(std::uint64_t master_seed, std::uint32_t run_index,
            std::string_view name) {
    using detail::splitmix64;
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ (0x9e3779b97f4a7c15ULL + run_index));
    s = splitmix64(s ^ detail::fnv1a64(name));
    eng_.seed(s);
  }

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // [0, n); n >= 1. Modulo bias is < 2^-59 for the small n used here.
  std::uint32_t uniform_int(std::uint32_t n) {
    return static_cast<std::uint32_t>(next_u64() % n);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; consumes two uniforms per call
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double z =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
  }

 private:
  std::mt19937_64 eng_{0x9e3779b97f4a7c15ULL};
};

}  // namespace bpfsim
