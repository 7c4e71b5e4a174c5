#include "fplab/lur.hpp"

#include <algorithm>
#include <cmath>

namespace fplab {
namespace {

constexpr double kSampledSafety = 0.5;

// delta(x, eps) on Ball(c, R): with s = ||x - c||,
//   eps <= R - s : (R - s)/2
//   else         : R - sqrt(R^2 + s^2 + 2 R s gamma)/2,
//                  gamma = clamp((R^2 + s^2 - eps^2)/(2 R s), -1, 1).
double ball_modulus(double R, double s, double eps) {
  if (s < 1e-15 || eps <= R - s) return 0.5 * (R - s);
  double gamma = (R * R + s * s - eps * eps) / (2.0 * R * s);
  gamma = std::clamp(gamma, -1.0, 1.0);
  return R - 0.5 * std::sqrt(std::max(0.0, R * R + s * s + 2.0 * R * s * gamma));
}

const Ball* as_ball(const ConvexBody& body, Vec& x_local) {
  if (const auto* b = dynamic_cast<const Ball*>(&body)) return b;
  if (const auto* t = dynamic_cast<const TranslatedBody*>(&body)) {
    x_local -= t->shift();
    return as_ball(*t->base(), x_local);
  }
  return nullptr;
}

}  // namespace

ConvexityModulus::ConvexityModulus(BodyPtr body, int directions)
    : body_(std::move(body)), directions_(directions) {
  if (!body_) throw DomainError("modulus needs a body");
}

double ConvexityModulus::sup_radius(const Vec& x) const {
  if (!body_->is_bounded()) return kInf;
  Vec xl = x;
  if (const Ball* b = as_ball(*body_, xl)) return b->radius() + (xl - b->center()).norm();
  if (const auto* hull = dynamic_cast<const PolytopeHull*>(body_.get())) {
    double best = 0.0;
    for (int j = 0; j < hull->vertices().cols(); ++j)
      best = std::max(best, (hull->vertices().col(j) - x).norm());
    return best;
  }
  Rng rng(0xdfdULL);
  double best = 0.0;
  for (int i = 0; i < directions_; ++i)
    best = std::max(best, body_->ray_max(x, unit_vec(rng, body_->ambient_dim())));
  return best;
}

ModulusEstimate ConvexityModulus::delta(const Vec& x, double eps) const {
  if (!body_->contains(x, 1e-7)) throw DomainError("modulus: x outside the body");
  if (!(eps > 0.0)) throw DomainError("modulus: eps must be positive");
  Vec xl = x;
  if (const Ball* b = as_ball(*body_, xl)) {
    const double s = (xl - b->center()).norm();
    if (eps >= b->radius() + s) throw DomainError("modulus: eps >= sup radius");
    return {ball_modulus(b->radius(), s, eps), "closed_form"};
  }
  // The boundary depth is concave along any segment inside the body, so
  // per direction the infimum over t in [eps, t_max] sits at an endpoint.
  const int d = body_->ambient_dim();
  const double far_cap = std::max(8.0 * eps, 64.0 * (1.0 + x.norm()));
  const auto probe = [&](const Vec& u) {
    const double tmax = body_->ray_max(x, u);
    if (tmax < eps) return kInf;
    double val = kInf;
    for (double t : {eps, std::min(tmax, far_cap)})
      val = std::min(val, body_->boundary_distance(x + (0.5 * t) * u));
    return val;
  };
  double best = kInf;
  Vec best_dir = Vec::Unit(d, 0);
  const auto consider = [&](const Vec& u) {
    const double val = probe(u);
    if (val < best) {
      best = val;
      best_dir = u;
    }
  };
  for (int i = 0; i < d && best > 0.0; ++i) {
    consider(Vec::Unit(d, i));
    consider(Vec(-Vec::Unit(d, i)));
  }
  Rng rng(0x10caULL);
  for (int i = 0; i < directions_ && best > 0.0; ++i) consider(unit_vec(rng, d));
  // local refinement around the best direction, shrinking perturbations
  double step = 0.5;
  for (int i = 0; i < 128 && best > 0.0 && best < kInf; ++i) {
    Vec u = best_dir + step * gaussian_vec(rng, d);
    const double n = u.norm();
    if (n < 1e-12) continue;
    u /= n;
    const double val = probe(u);
    if (val < best) {
      best = val;
      best_dir = u;
    } else {
      step *= 0.95;
    }
  }
  if (best == kInf) throw DomainError("modulus: eps exceeds every ray extent");
  return {kSampledSafety * best, "sampled"};
}

ModulusEstimate delta_C(const ConvexBody& body, const Vec& x, double eps) {
  // non-owning view of the body for the duration of the call
  ConvexityModulus m(BodyPtr(&body, [](const ConvexBody*) {}));
  if (eps >= m.sup_radius(x)) throw DomainError("delta_C: eps >= sup radius at x");
  return m.delta(x, eps);
}

AngleCheck angle_bound_check(const ConvexBody& body, const Vec& x, const Vec& y,
                             const Vec& z, double r, double s, double delta_val) {
  if (!body.contains(y, 1e-6)) throw DomainError("angle bound: y must lie on the boundary");
  const double depth = body.contains(y, 0.0) ? body.boundary_distance(y) : 0.0;
  if (depth > 1e-6) throw DomainError("angle bound: y is interior, not boundary");
  if (!body.contains(z, 1e-9)) throw DomainError("angle bound: z must lie in the body");
  const double dxy = (x - y).norm();
  if (dxy < r - 1e-12 || dxy > s + 1e-12)
    throw DomainError("angle bound: ||x-y|| must lie in [r, s]");
  const double dzy = (z - y).norm();
  if (dzy < 1e-14) throw DomainError("angle bound: z must differ from y");
  if (!(delta_val >= 0.0)) throw DomainError("angle bound: delta must be nonnegative");

  AngleCheck out;
  out.inner = (z - y).dot(x - y) / (dzy * dxy);
  out.bound = -s / std::sqrt(s * s + 4.0 * delta_val * delta_val);
  out.slack = out.inner - out.bound;
  out.ok = out.slack >= -1e-9;
  return out;
}

ContractionProfile::ContractionProfile(const ConvexityModulus& modulus, Vec x0)
    : delta_([&modulus, x0 = std::move(x0)](double e) {
        return modulus.delta(x0, e).value;
      }) {}

ContractionProfile::ContractionProfile(std::function<double(double)> delta_of_eps)
    : delta_(std::move(delta_of_eps)) {}

double ContractionProfile::modulus_at(double r) const {
  auto it = cache_.find(r);
  if (it != cache_.end()) return it->second;
  const double d = delta_(r / 8.0);
  if (!(d > 0.0))
    throw DomainError("contraction profile: modulus vanished (body not LUR here)");
  cache_.emplace(r, d);
  return d;
}

double ContractionProfile::beta(double r) const {
  if (!(r > 0.0)) throw DomainError("contraction profile: r must be positive");
  const double d = modulus_at(r);
  const double b = 5.0 * r / std::sqrt(25.0 * r * r + 256.0 * d * d);
  // For delta << r the exact value is within one ulp of 1; the cap keeps
  // beta, eps and alpha strictly inside the open interval at double
  // precision without weakening any claim the caller can represent.
  return std::min(b, 1.0 - 1e-13);
}

double ContractionProfile::eps(double r) const {
  const double b = beta(r);
  return std::min(0.125, 0.5 * (std::sqrt(2.0 / (1.0 + b)) - 1.0));
}

double ContractionProfile::alpha(double r) const {
  const double b = beta(r);
  return std::max(0.75, std::sqrt(0.5 * (1.0 + b)) * (1.0 + eps(r)));
}

ContractionProfile contraction_profile(const ConvexityModulus& modulus, const Vec& x0) {
  return ContractionProfile(modulus, x0);
}

MilestoneRecord verify_milestone(const NonexpansiveMap& f, const Vec& x_fix,
                                 const Vec& x, const ContractionProfile& profile,
                                 long k_budget, double margin) {
  if ((f.evaluate(x_fix) - x_fix).norm() > 1e-8)
    throw DomainError("verify_milestone: x_fix is not fixed to 1e-8");
  MilestoneRecord rec;
  rec.r_before = (x - x_fix).norm();
  if (rec.r_before < 1e-15) {
    rec.found = true;
    rec.endpoint = x;
    rec.r_after = rec.r_before;
    rec.alpha_used = 0.75;
    return rec;
  }
  rec.alpha_used = profile.alpha(rec.r_before);
  const double target = rec.alpha_used * rec.r_before;
  Vec cur = x;
  double prev = rec.r_before;
  for (long k = 1; k <= k_budget; ++k) {
    cur = f.evaluate(cur);
    const double rk = (cur - x_fix).norm();
    if (rk > prev + margin) rec.monotone_ok = false;
    prev = rk;
    if (rk <= target) {
      rec.found = true;
      rec.k = k;
      rec.r_after = rk;
      rec.endpoint = cur;
      return rec;
    }
  }
  rec.r_after = prev;
  rec.endpoint = cur;
  return rec;
}

ConvergenceCertificate iterate_to_fixed_point(const NonexpansiveMap& f, const Vec& x,
                                              const Vec& x_fix,
                                              const ContractionProfile& profile,
                                              double tol, long k_budget, double margin) {
  ConvergenceCertificate cert;
  Vec cur = x;
  const long max_milestones = 100000;
  for (long i = 0; i < max_milestones; ++i) {
    const double r = (cur - x_fix).norm();
    if (r <= tol) {
      cert.converged = true;
      cert.final_point = cur;
      return cert;
    }
    MilestoneRecord rec = verify_milestone(f, x_fix, cur, profile, k_budget, margin);
    if (!rec.found)
      throw ConvergenceError("milestone search stalled before reaching tolerance",
                             rec.r_after);
    cur = rec.endpoint;
    cert.chain.push_back(std::move(rec));
  }
  throw ConvergenceError("milestone chain exceeded its cap", (cur - x_fix).norm());
}

}  // namespace fplab
