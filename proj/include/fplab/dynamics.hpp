#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fplab/maps.hpp"

namespace fplab {

/// Recorded iterate sequence with residuals ||f(x_k) - x_k|| and
/// boundary distances dist(x_k, boundary).
struct OrbitTrace {
  std::vector<Vec> points;
  std::vector<double> residuals;
  std::vector<double> boundary_distances;
  std::string scheme;  // "picard" | "km"
};

OrbitTrace picard_orbit(const NonexpansiveMap& f, const Vec& x0, int k);

/// Trace of the averaged scheme x <- (x + f(x))/2; residuals are w.r.t. f.
OrbitTrace km_orbit(const NonexpansiveMap& f, const Vec& x0, int k);

struct KmResult {
  std::optional<Vec> fixed_point;
  double residual = kInf;
  long iterations = 0;
};

/// Averaged iteration x <- (x + f(x))/2; absence of a fixed point within
/// the budget is a legitimate outcome, not an error.
KmResult km_fixed_point(const NonexpansiveMap& f, const Vec& x0, double tol = 1e-8,
                        long max_iter = 100000);

/// If ||f(x) - x|| > 2r, no fixed point can lie in the closed ball B(x, r).
struct ExclusionCertificate {
  bool issued = false;
  Vec center;
  double radius = 0.0;
  double residual = 0.0;  // ||f(x) - x||
};

ExclusionCertificate exclusion_ball(const NonexpansiveMap& f, const Vec& x, double r);

}  // namespace fplab
