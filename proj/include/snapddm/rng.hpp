// Copyright (c) 2026 The snapddm Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SNAPDDM_RNG_HPP
#define SNAPDDM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace snapddm {

// splitmix64, used to derive stream seeds.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic RNG. mt19937_64 is standardized bit-exactly; the value mappings
// below avoid std::*_distribution, whose sequences are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // integer in [0, n)
  uint64_t uniform_index(uint64_t n) {
    // modulo bias is < 2^-40 for n below ~16M; acceptable for sampling use here
    return eng_() % n;
  }

  // standard normal via Box-Muller (pairs generated, second value dropped)
  double normal() {
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::complex<double> normal_complex() {
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
  }

  // Independent child stream k of this generator's seed space.
  static Rng fork(uint64_t seed, uint64_t stream) {
    uint64_t s = seed ^ (0x632be59bd9b4e019ULL * (stream + 1));
    uint64_t mixed = splitmix64(s);
    return Rng(mixed);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace snapddm

#endif  // SNAPDDM_RNG_HPP
