#include "fplab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace fplab {
namespace {

// All lattice points z with |z_i| <= zmax, keyed for (norm^2, lex) order.
struct LatticePoint {
  std::vector<int32_t> z;
  int64_t norm2;
};

bool lattice_less(const LatticePoint& a, const LatticePoint& b) {
  if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
  return a.z < b.z;
}

}  // namespace

ThetaSequence::ThetaSequence(BodyPtr body, long candidate_cap)
    : body_(std::move(body)), candidate_cap_(candidate_cap) {
  if (!body_) throw DomainError("theta sequence needs a body");
}

Vec ThetaSequence::term(int j) const {
  if (j < 1) throw DomainError("theta terms are 1-based");
  std::lock_guard<std::mutex> lock(mu_);
  grow_to(j);
  return cache_[static_cast<size_t>(j - 1)];
}

void ThetaSequence::grow_to(int count) const {
  const int d = body_->ambient_dim();
  while (static_cast<int>(cache_.size()) < count) {
    const int m = scale_done_ + 1;
    const double step = std::ldexp(1.0, -m);
    const int64_t zmax = static_cast<int64_t>(m) << m;  // extent m at spacing 2^-m
    double cand_count = 1.0;
    for (int i = 0; i < d; ++i) cand_count *= static_cast<double>(2 * zmax + 1);
    if (cand_count > static_cast<double>(candidate_cap_))
      throw DomainError(
          "theta sequence: scale too large to enumerate at this ambient dimension");
    // TODO: shell-by-shell enumeration would lift the cap for deep terms in
    // high dimension; the metric truncations used here never get close.
    std::vector<LatticePoint> pts;
    std::vector<int32_t> z(static_cast<size_t>(d), static_cast<int32_t>(-zmax));
    const int64_t prev_zmax = scale_done_ == 0
                                  ? -1
                                  : (static_cast<int64_t>(scale_done_) << scale_done_);
    while (true) {
      // skip points already emitted at the previous scale (all-even z
      // within the previous extent)
      bool dup = prev_zmax >= 0;
      int64_t n2 = 0;
      for (int i = 0; i < d; ++i) {
        n2 += static_cast<int64_t>(z[static_cast<size_t>(i)]) * z[static_cast<size_t>(i)];
        if (dup && (z[static_cast<size_t>(i)] % 2 != 0 ||
                    std::abs(z[static_cast<size_t>(i)] / 2) > prev_zmax))
          dup = false;
      }
      if (!dup) pts.push_back(LatticePoint{z, n2});
      int i = 0;
      for (; i < d; ++i) {
        if (z[static_cast<size_t>(i)] < zmax) {
          ++z[static_cast<size_t>(i)];
          break;
        }
        z[static_cast<size_t>(i)] = static_cast<int32_t>(-zmax);
      }
      if (i == d) break;
    }
    std::sort(pts.begin(), pts.end(), lattice_less);
    for (const LatticePoint& p : pts) {
      Vec x(d);
      for (int i = 0; i < d; ++i) x[i] = step * p.z[static_cast<size_t>(i)];
      cache_.push_back(body_->project(x));
    }
    scale_done_ = m;
  }
}

MetricValue d_theta(const NonexpansiveMap& f, const NonexpansiveMap& g,
                    const ThetaSequence& theta, int n) {
  if (n < 1) throw DomainError("d_theta needs n >= 1 terms");
  MetricValue mv;
  mv.terms = n;
  mv.tail_bound = std::ldexp(1.0, -n);
  for (int j = 1; j <= n; ++j) {
    const Vec t = theta.term(j);
    const double rho = (f.evaluate(t) - g.evaluate(t)).norm();
    mv.value += std::ldexp(1.0, -j) * rho / (1.0 + rho);
  }
  return mv;
}

bool in_U(const NonexpansiveMap& g, const NonexpansiveMap& f, const Vec& x, double eps) {
  return (g.evaluate(x) - f.evaluate(x)).norm() < eps;
}

bool in_V(const NonexpansiveMap& g, const NonexpansiveMap& f, const Vec& x, double eps,
          int k) {
  if (k < 1) throw DomainError("in_V needs k >= 1");
  Vec xf = x, xg = x;
  for (int i = 0; i < k; ++i) {
    xf = f.evaluate(xf);
    xg = g.evaluate(xg);
  }
  return (xg - xf).norm() < eps;
}

}  // namespace fplab
