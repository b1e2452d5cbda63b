#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "doctest.h"

namespace fwtest {

// splitmix64; reproducible across platforms, unlike the std distributions.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double log_uniform(double lo, double hi);

 private:
  std::uint64_t s_;
};

inline double Gen::log_uniform(double lo, double hi) {
  return lo * std::pow(hi / lo, uniform());
}

// Runs prop on n generated cases; the case index and seed show up in the failure message.
inline void for_all(int n, std::uint64_t seed, const std::function<void(Gen&, int)>& prop) {
  Gen g(seed);
  for (int i = 0; i < n; ++i) {
    CAPTURE(i);
    CAPTURE(seed);
    prop(g, i);
  }
}

}  // namespace fwtest
