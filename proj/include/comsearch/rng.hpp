#ifndef COMSEARCH_RNG_HPP
#define COMSEARCH_RNG_HPP

#include <cstdint>

#include "comsearch/rational.hpp"

namespace comsearch {

// splitmix64: deterministic across platforms, unlike std distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, bound)
  uint64_t below(uint64_t bound) { return next() % bound; }

  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1))); }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // nonzero rational with small numerator/denominator, mildly spread out
  Rational small_rational() {
    long num = range(1, 97);
    long den = range(1, 13);
    return make_rational(num, den);
  }

 private:
  uint64_t state_;
};

}  // namespace comsearch

#endif
