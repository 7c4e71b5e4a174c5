#pragma once

#include <mutex>
#include <vector>

#include "fplab/bodies.hpp"
#include "fplab/maps.hpp"

namespace fplab {

/// Deterministic dense sequence in a body: dyadic lattices of spacing
/// 2^-m over the box of extent m, ordered by (norm, lex) and pushed
/// through the body's nearest-point projection. Lattice points already
/// emitted at a coarser scale are skipped; distinct lattice points that
/// project to the same body point are kept.
class ThetaSequence {
 public:
  explicit ThetaSequence(BodyPtr body, long candidate_cap = (1L << 23));

  /// 1-based term index. The cache grows monotonically; reads are
  /// concurrent, appends serialized.
  Vec term(int j) const;

  int ambient_dim() const { return body_->ambient_dim(); }
  const BodyPtr& body() const { return body_; }

 private:
  void grow_to(int count) const;
  BodyPtr body_;
  long candidate_cap_;
  mutable std::vector<Vec> cache_;
  mutable int scale_done_ = 0;
  mutable std::mutex mu_;
};

/// Truncated metric value: `value` is a lower bound of the full series,
/// `value + tail_bound` an upper bound (tail_bound = 2^-terms).
struct MetricValue {
  double value = 0.0;
  int terms = 0;
  double tail_bound = 0.0;
  double upper() const { return value + tail_bound; }
};

/// Partial sum of sum_j 2^-j rho_j / (1 + rho_j) over the first n terms,
/// rho_j = ||f(theta_j) - g(theta_j)||.
MetricValue d_theta(const NonexpansiveMap& f, const NonexpansiveMap& g,
                    const ThetaSequence& theta, int n);

/// Pointwise neighborhood test: ||g(x) - f(x)|| < eps, strict.
bool in_U(const NonexpansiveMap& g, const NonexpansiveMap& f, const Vec& x, double eps);

/// Iterated neighborhood test: ||g^k(x) - f^k(x)|| < eps, strict; k >= 1.
bool in_V(const NonexpansiveMap& g, const NonexpansiveMap& f, const Vec& x, double eps,
          int k);

}  // namespace fplab
