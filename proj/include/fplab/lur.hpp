#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fplab/dynamics.hpp"

namespace fplab {

struct ModulusEstimate {
  double value = 0.0;
  std::string method;  // "closed_form" | "sampled"
};

/// Modulus of rotundity delta(x, eps): infimum over far points y of the
/// boundary depth of the midpoint (x+y)/2. Closed form on balls; a seeded
/// directional search elsewhere, reported conservatively (scaled down) so
/// downstream contraction factors stay valid under estimation error.
class ConvexityModulus {
 public:
  explicit ConvexityModulus(BodyPtr body, int directions = 512);
  ModulusEstimate delta(const Vec& x, double eps) const;
  /// sup ||y - x|| over the body (+inf when unbounded).
  double sup_radius(const Vec& x) const;
  const BodyPtr& body() const { return body_; }

 private:
  BodyPtr body_;
  int directions_;
};

/// Lower-bound estimate of the modulus at (x, eps). Domain error unless
/// x is in the body and 0 < eps < sup_radius(x).
ModulusEstimate delta_C(const ConvexBody& body, const Vec& x, double eps);

struct AngleCheck {
  bool ok = false;
  double inner = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // inner - bound
};

/// Boundary-cone inequality: for y on the boundary, r <= ||x-y|| <= s and
/// z in the body, the normalized inner product of z-y against x-y stays
/// above -s / sqrt(s^2 + 4 delta^2).
AngleCheck angle_bound_check(const ConvexBody& body, const Vec& x, const Vec& y,
                             const Vec& z, double r, double s, double delta_val);

/// beta(r) = 5r / sqrt(25 r^2 + 256 delta(r/8)^2),
/// eps(r)  = min{1/8, (sqrt(2/(1+beta)) - 1)/2},
/// alpha(r) = max{3/4, sqrt((1+beta)/2) (1+eps)} — strictly below 1.
class ContractionProfile {
 public:
  ContractionProfile(const ConvexityModulus& modulus, Vec x0);
  /// Profile over a caller-supplied modulus evaluator eps -> delta.
  explicit ContractionProfile(std::function<double(double)> delta_of_eps);
  double beta(double r) const;
  double eps(double r) const;
  double alpha(double r) const;
  double modulus_at(double r) const;  // delta(r/8), cached

 private:
  std::function<double(double)> delta_;
  mutable std::map<double, double> cache_;
};

ContractionProfile contraction_profile(const ConvexityModulus& modulus, const Vec& x0);

struct MilestoneRecord {
  bool found = false;
  long k = 0;
  double r_before = 0.0;
  double r_after = 0.0;
  double alpha_used = 0.0;
  bool monotone_ok = true;
  Vec endpoint;
};

/// Searches k <= k_budget with ||f^k(x) - x_fix|| <= alpha(r) r where
/// r = ||x - x_fix||; distances along the way must be nonincreasing
/// within `margin`. x_fix must be fixed to residual 1e-8.
MilestoneRecord verify_milestone(const NonexpansiveMap& f, const Vec& x_fix,
                                 const Vec& x, const ContractionProfile& profile,
                                 long k_budget, double margin = 1e-10);

struct ConvergenceCertificate {
  std::vector<MilestoneRecord> chain;
  Vec final_point;
  bool converged = false;
};

/// Repeats milestone searches until ||f^k(x) - x_fix|| <= tol; a stalled
/// milestone raises ConvergenceError with the stalled radius.
ConvergenceCertificate iterate_to_fixed_point(const NonexpansiveMap& f, const Vec& x,
                                              const Vec& x_fix,
                                              const ContractionProfile& profile,
                                              double tol, long k_budget = 10000,
                                              double margin = 1e-10);

}  // namespace fplab
