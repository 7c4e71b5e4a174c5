#pragma once

#include <cmath>
#include <random>

#include "fplab/geometry.hpp"

namespace fplab {

// All randomized routines take an explicit engine; no ambient randomness.
using Rng = std::mt19937_64;

inline Vec gaussian_vec(Rng& rng, int d) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = n01(rng);
  return v;
}

inline Vec unit_vec(Rng& rng, int d) {
  Vec v = gaussian_vec(rng, d);
  double n = v.norm();
  while (n < 1e-12) {
    v = gaussian_vec(rng, d);
    n = v.norm();
  }
  return v / n;
}

inline Vec uniform_in_ball(Rng& rng, const Vec& center, double radius) {
  const int d = static_cast<int>(center.size());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double r = radius * std::pow(u01(rng), 1.0 / d);
  return center + r * unit_vec(rng, d);
}

/// Random unit vector inside a subspace.
inline Vec unit_vec_in(Rng& rng, const Subspace& F) {
  Vec c = gaussian_vec(rng, F.dim());
  double n = c.norm();
  while (n < 1e-12) {
    c = gaussian_vec(rng, F.dim());
    n = c.norm();
  }
  return F.basis() * (c / n);
}

}  // namespace fplab
