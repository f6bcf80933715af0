#pragma once

#include <cmath>
#include <cstdint>

namespace fsg {

// Counter-based random streams. A stream is identified by a key derived from
// (seed, tag, a, b); draws are pure functions of (key, counter), so results
// do not depend on worker scheduling.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
public:
  static RngStream keyed(uint64_t seed, uint64_t tag, uint64_t a = 0,
                         uint64_t b = 0) {
    uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ splitmix64(tag ^ 0x6a09e667f3bcc909ULL));
    k = splitmix64(k ^ splitmix64(a ^ 0xbb67ae8584caa73bULL));
    k = splitmix64(k ^ splitmix64(b ^ 0x3c6ef372fe94f82bULL));
    return RngStream(k);
  }

  uint64_t next_u64() { return splitmix64(key_ + counter_++); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n).
  uint64_t next_below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t threshold = -n % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller; second value cached.
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Exact Binomial(m, p) as m Bernoulli trials.
  uint64_t binomial(uint64_t m, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return m;
    uint64_t s = 0;
    for (uint64_t i = 0; i < m; ++i) s += (next_double() < p) ? 1 : 0;
    return s;
  }

private:
  explicit RngStream(uint64_t key) : key_(key) {}
  uint64_t key_;
  uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace fsg
