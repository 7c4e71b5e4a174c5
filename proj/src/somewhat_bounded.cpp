#include "fplab/somewhat_bounded.hpp"

#include <algorithm>
#include <cmath>

namespace fplab {

SBCertificate certificate_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected a certificate object");
  SBCertificate cert{vec_from_json(j.at("x0"), where + "/x0"),
                     subspace_from_json(j.at("subspace"), where + "/subspace"),
                     j.at("alpha").get<double>(), j.at("beta").get<double>()};
  if (!(cert.alpha > 0.0) || !(cert.beta > 0.0))
    throw ConfigError(where, "alpha and beta must be positive");
  return cert;
}

Json certificate_to_json(const SBCertificate& cert) {
  return Json{{"x0", vec_to_json(cert.x0)},
              {"subspace", basis_to_json(cert.F)},
              {"alpha", cert.alpha},
              {"beta", cert.beta}};
}

bool in_blunt_cone(const Vec& x, const Subspace& F, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw DomainError("in_blunt_cone needs alpha, beta > 0");
  const double slack = F.reject(x).norm() - beta - (beta / alpha) * F.project(x).norm();
  return slack <= 1e-12;
}

Verdict verify_certificate(const ConvexBody& body, const SBCertificate& cert,
                           int sample_count, uint64_t rng_seed) {
  if (cert.F.dim() == 0)
    throw CertificateViolation("certificate subspace must have dim >= 1");
  if (!(cert.alpha > 0.0) || !(cert.beta > 0.0))
    throw CertificateViolation("certificate needs alpha, beta > 0");
  if (cert.x0.size() != body.ambient_dim())
    throw CertificateViolation("certificate base point dimension mismatch");

  Verdict v;
  Rng rng(rng_seed);
  const auto fail_at = [&](const Vec& witness, double slack) {
    v.pass = false;
    v.worst_slack = std::max(v.worst_slack, slack);
    if (!v.counterexample) v.counterexample = witness;
  };
  v.pass = true;

  // Inclusion 1: alpha-sphere of F, shifted by x0, must sit in the body.
  const int half = std::max(1, sample_count / 2);
  if (!body.contains(cert.x0, 1e-9)) fail_at(cert.x0, (body.project(cert.x0) - cert.x0).norm());
  for (int i = 0; i < half; ++i) {
    const Vec p = cert.x0 + cert.alpha * unit_vec_in(rng, cert.F);
    ++v.samples;
    if (!body.contains(p, 1e-9)) {
      fail_at(p, (body.project(p) - p).norm());
    }
  }

  // Inclusion 2: body samples land in D_F(alpha, beta) around x0.
  const auto cone_slack = [&](const Vec& y) {
    return cert.F.reject(y).norm() - cert.beta -
           (cert.beta / cert.alpha) * cert.F.project(y).norm();
  };
  const double probe_mag = 2.0 * cert.beta * (1.0 + 1.0 / cert.alpha) + 1.0;
  const Subspace comp = cert.F.complement();
  for (int j = 0; j < comp.dim(); ++j) {
    for (double s : {probe_mag, 4.0 * probe_mag}) {
      for (double sign : {1.0, -1.0}) {
        const Vec p = cert.x0 + sign * s * comp.basis().col(j);
        if (!body.contains(p, 1e-9)) continue;  // probe outside: no information
        ++v.samples;
        const double slack = cone_slack(p - cert.x0);
        if (slack > 1e-12) fail_at(p, slack);
        v.worst_slack = std::max(v.worst_slack, slack);
      }
    }
  }
  const double radius = std::max(10.0, 6.0 * (cert.alpha + cert.beta));
  for (int i = 0; i < half; ++i) {
    const Vec p = sample_in_body(body, rng, radius);
    ++v.samples;
    const double slack = cone_slack(p - cert.x0);
    if (slack > 1e-12) fail_at(p, slack);
    v.worst_slack = std::max(v.worst_slack, slack);
  }
  return v;
}

CoveringParameters covering_parameters(double alpha, double beta, double lambda) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(lambda > 0.0))
    throw DomainError("covering_parameters needs positive alpha, beta, lambda");
  const double hyp = std::sqrt(alpha * alpha + beta * beta);
  // Coefficient 1 - beta/hyp is always positive; take t at equality.
  CoveringParameters p;
  p.lambda = lambda;
  p.t = (lambda * hyp + alpha * beta) / (hyp - beta);
  const double cross = beta + beta * p.t / alpha;
  p.r = std::sqrt(4.0 * p.t * p.t + cross * cross);
  p.r_prime = std::sqrt(p.r * p.r + p.t * p.t);
  return p;
}

CoveringReport check_covering(const ConvexBody& body, const SBCertificate& cert,
                              double lambda, int sample_count, uint64_t rng_seed) {
  if (body.is_bounded())
    throw DomainError("check_covering expects an unbounded body");
  if (cert.F.dim() == 0)
    throw CertificateViolation("certificate subspace must have dim >= 1");
  CoveringReport rep;
  rep.params = covering_parameters(cert.alpha, cert.beta, lambda);
  const double t = rep.params.t;
  const double r = rep.params.r;
  const double rp = rep.params.r_prime;
  const Subspace& F = cert.F;
  // Work in coordinates recentered at x0.
  const auto project_recentered = [&](const Vec& w) {
    return Vec(body.project(w + cert.x0) - cert.x0);
  };

  // A far point p with ||pi_F(p)|| >= t; probe along F directions.
  std::optional<Vec> far;
  Rng rng(rng_seed);
  const auto try_dir = [&](const Vec& u) {
    if (far) return;
    const double extent = body.ray_max(cert.x0, u);
    if (extent < 1.05 * t) return;
    const double s = extent == kInf ? 2.0 * t : std::min(0.99 * extent, 2.0 * t);
    const Vec cand = s * u;  // recentered
    if (F.project(cand).norm() >= t) far = cand;
  };
  for (int j = 0; j < F.dim() && !far; ++j)
    for (double sign : {1.0, -1.0}) try_dir(sign * F.basis().col(j));
  for (int i = 0; i < 64 && !far; ++i) try_dir(unit_vec_in(rng, F));
  if (!far)
    throw ConvergenceError(
        "no point with ||pi_F|| >= t within the search horizon (body may be bounded)", t);

  const Vec pf = F.project(*far);
  const Vec v = (t / pf.norm()) * pf;
  const double hyp = std::sqrt(cert.alpha * cert.alpha + cert.beta * cert.beta);
  const double v_lower = v.norm() - (cert.beta / hyp) * (cert.alpha + t);
  const double v_margin = project_recentered(v).norm();
  if (v_margin < v_lower - 1e-7)
    throw CertificateViolation("covering witness v violates its projection lower bound");
  rep.worst_membership_slack = std::min(rep.worst_membership_slack, v_margin - lambda);

  rep.pass = true;
  for (int i = 0; i < sample_count; ++i) {
    const Vec sample = sample_in_ball_intersection(body, rng, cert.x0, rp);
    const Vec x = sample - cert.x0;
    ++rep.samples;
    const Vec xf = F.project(x);
    Vec witness;
    if (xf.norm() > t) {
      witness = (t / xf.norm()) * xf;
      const double lhs = (x - witness).squaredNorm();
      const double rhs = r * r + 2.0 * t * t - 2.0 * t * xf.norm();
      rep.worst_chain_slack = std::max(rep.worst_chain_slack, lhs - rhs);
      if (lhs - rhs > 1e-9) rep.pass = false;
    } else {
      witness = v;
    }
    const double dist_slack = (x - witness).norm() - r;
    rep.worst_distance_slack = std::max(rep.worst_distance_slack, dist_slack);
    const double member_slack = project_recentered(witness).norm() - lambda;
    rep.worst_membership_slack = std::min(rep.worst_membership_slack, member_slack);
    if (dist_slack > 1e-7 || member_slack < -1e-9) {
      rep.pass = false;
      if (!rep.counterexample) rep.counterexample = sample;
    }
  }
  return rep;
}

}  // namespace fplab
