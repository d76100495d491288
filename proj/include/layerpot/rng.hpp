#pragma once

#include <cstdint>
#include <random>

#include "layerpot/types.hpp"

namespace layerpot {

// splitmix64, used to derive independent sub-streams from one user seed so
// that adding a consumer never perturbs the draws of another.
inline uint64_t split_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) : eng_(split_seed(seed, stream)) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(eng_);
  }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

  RVec unit_vector(int n) {
    RVec v(n);
    double s = 0.0;
    do {
      s = 0.0;
      for (int i = 0; i < n; ++i) {
        v[i] = gaussian();
        s += v[i] * v[i];
      }
    } while (s < 1e-24);
    s = std::sqrt(s);
    for (int i = 0; i < n; ++i) v[i] /= s;
    return v;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace layerpot
