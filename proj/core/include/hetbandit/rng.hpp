#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hetbandit {

// mt19937_64 with explicitly-coded draws. std::uniform_real_distribution and
// friends are implementation-defined, which would break byte-for-byte
// reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform on [0, n), rejection sampled (unbiased)
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do { x = gen_(); } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller, one cached value
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace hetbandit
