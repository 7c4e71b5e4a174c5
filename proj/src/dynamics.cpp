#include "fplab/dynamics.hpp"

namespace fplab {

OrbitTrace picard_orbit(const NonexpansiveMap& f, const Vec& x0, int k) {
  if (k < 0) throw DomainError("picard_orbit needs k >= 0");
  const BodyPtr body = f.domain();
  OrbitTrace trace;
  trace.scheme = "picard";
  trace.points.reserve(static_cast<size_t>(k) + 1);
  Vec x = x0;
  Vec fx = f.evaluate(x);
  for (int i = 0;; ++i) {
    trace.points.push_back(x);
    trace.residuals.push_back((fx - x).norm());
    trace.boundary_distances.push_back(body->boundary_distance(x));
    if (i == k) break;
    x = fx;
    fx = f.evaluate(x);
  }
  return trace;
}

OrbitTrace km_orbit(const NonexpansiveMap& f, const Vec& x0, int k) {
  if (k < 0) throw DomainError("km_orbit needs k >= 0");
  const BodyPtr body = f.domain();
  OrbitTrace trace;
  trace.scheme = "km";
  Vec x = x0;
  Vec fx = f.evaluate(x);
  for (int i = 0;; ++i) {
    trace.points.push_back(x);
    trace.residuals.push_back((fx - x).norm());
    trace.boundary_distances.push_back(body->boundary_distance(x));
    if (i == k) break;
    x = 0.5 * (x + fx);
    fx = f.evaluate(x);
  }
  return trace;
}

KmResult km_fixed_point(const NonexpansiveMap& f, const Vec& x0, double tol,
                        long max_iter) {
  KmResult out;
  Vec x = x0;
  for (long it = 0; it < max_iter; ++it) {
    const Vec fx = f.evaluate(x);
    const double res = (fx - x).norm();
    out.iterations = it + 1;
    if (res <= tol) {
      out.fixed_point = x;
      out.residual = res;
      return out;
    }
    out.residual = res;
    x = 0.5 * (x + fx);
  }
  return out;
}

ExclusionCertificate exclusion_ball(const NonexpansiveMap& f, const Vec& x, double r) {
  if (!(r > 0.0)) throw DomainError("exclusion_ball needs r > 0");
  ExclusionCertificate cert;
  cert.center = x;
  cert.radius = r;
  cert.residual = (f.evaluate(x) - x).norm();
  cert.issued = cert.residual > 2.0 * r;
  return cert;
}

}  // namespace fplab
