#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ontoloss {

// Deterministic random stream. Every stochastic component in the library
// (data generation, weight init, shuffling) draws from one of these, seeded
// explicitly, so identical seeds give identical results across platforms.
// mt19937_64 output is fixed by the standard; the derived draws below avoid
// std::uniform_real_distribution and friends, whose streams are
// implementation-defined.
class RandomStream {
 public:
  // a zero seed is remapped: mt19937_64 seeded with 0 starts in a poor state
  explicit RandomStream(uint64_t seed) : gen_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64() { return gen_(); }

  // uniform on [0,1) with 53 random bits
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller (cosine branch only; no cached spare, so
  // the stream position is a pure function of the call count)
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // unbiased integer on [0,n), n > 0
  uint64_t below(uint64_t n) {
    const uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const uint64_t r = gen_();
      if (r >= reject_below) return r % n;
    }
  }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ontoloss
