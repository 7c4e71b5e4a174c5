#include "fplab/constructions.hpp"

#include <algorithm>
#include <cmath>

namespace fplab {
namespace {

int terms_for_tail(double budget) {
  // smallest n with 2^-n < budget
  int n = 1;
  while (std::ldexp(1.0, -n) >= budget) {
    ++n;
    if (n > 1020) throw DomainError("metric budget too small");
  }
  return n;
}

PostCheck check_leq(const std::string& name, double measured, double bound) {
  return PostCheck{name, measured <= bound, measured, bound};
}

PostCheck check_flag(const std::string& name, bool ok, double measured, double tol) {
  return PostCheck{name, ok, measured, tol};
}

/// Conjugates a recentered map back to original coordinates:
/// x -> inner(x - x0) + x0.
MapPtr conjugate_by_shift(const MapPtr& inner, const Vec& x0, const BodyPtr& domain) {
  if (x0.norm() == 0.0) return inner;
  return compose({translation_map(x0, domain), inner,
                  translation_map(-x0, std::make_shared<FullSpace>(
                                           static_cast<int>(x0.size())))});
}

/// Greedy net on the radius-t sphere of F (recentered coordinates),
/// filtered by ||pi_C(.)|| >= lambda. dim F <= 3 so an angular grid is a
/// faithful cover.
std::vector<Vec> net_on_far_sphere(const ConvexBody& body, const Vec& x0,
                                   const Subspace& F, double t, double lambda,
                                   double delta) {
  if (F.dim() > 3)
    throw ConstructionError("net construction supports dim F <= 3");
  // Grid pitch plus greedy threshold must stay below delta, so the net
  // covers the whole filtered set at radius < delta.
  const double pitch = F.dim() == 3 ? 0.25 * delta : 0.125 * delta;
  const double threshold = delta - 1.2 * pitch;
  std::vector<Vec> grid;
  if (F.dim() == 1) {
    grid.push_back(t * F.basis().col(0));
    grid.push_back(-t * F.basis().col(0));
  } else if (F.dim() == 2) {
    const int steps =
        std::max<int>(64, static_cast<int>(std::ceil(2.0 * M_PI * t / pitch)));
    for (int i = 0; i < steps; ++i) {
      const double a = 2.0 * M_PI * i / steps;
      grid.push_back(t * (std::cos(a) * F.basis().col(0) + std::sin(a) * F.basis().col(1)));
    }
  } else {
    // Fibonacci sphere at the same pitch.
    const double target = pitch / t;
    const int count = std::max<int>(256, static_cast<int>(std::ceil(16.0 / (target * target))));
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * i;
      grid.push_back(t * (rad * std::cos(a) * F.basis().col(0) +
                          rad * std::sin(a) * F.basis().col(1) + z * F.basis().col(2)));
    }
  }
  std::vector<Vec> kept;
  for (const Vec& v : grid)
    if ((body.project(v + x0) - x0).norm() >= lambda) kept.push_back(v);
  std::vector<Vec> net;
  for (const Vec& v : kept) {
    bool covered = false;
    for (const Vec& c : net)
      if ((v - c).norm() <= threshold) {
        covered = true;
        break;
      }
    if (!covered) net.push_back(v);
  }
  if (net.empty())
    throw ConstructionError("net construction found no points with ||pi_C|| >= lambda");
  return net;
}

}  // namespace

bool PerturbationReport::all_pass() const {
  for (const PostCheck& c : checks)
    if (!c.pass) return false;
  return true;
}

Json PerturbationReport::to_json() const {
  Json cs = Json::array();
  for (const PostCheck& c : checks)
    cs.push_back(Json{{"name", c.name},
                      {"pass", c.pass},
                      {"measured", finite_or_tag(c.measured)},
                      {"tolerance", c.tolerance}});
  return Json{{"parameters", parameters},
              {"metric_distance",
               Json{{"value", metric_distance.value},
                    {"terms", metric_distance.terms},
                    {"tail_bound", metric_distance.tail_bound}}},
              {"checks", cs},
              {"pass", all_pass()}};
}

PerturbationReport build_fixed_point_perturbation(const MapPtr& f, double eps,
                                                  const SBCertificate& cert,
                                                  const ThetaSequence& theta,
                                                  const FixedPointOptions& opt) {
  const BodyPtr body = theta.body();
  PerturbationReport rep;
  if (body->is_bounded()) {
    // Bounded bodies need no perturbation at all.
    rep.perturbed = f;
    rep.metric_distance = MetricValue{0.0, 1, 0.0};
    const KmResult km = km_fixed_point(*f, body->interior_point(), opt.km_tol, opt.km_max_iter);
    rep.parameters = Json{{"bounded_short_circuit", true}, {"eps", eps}};
    rep.checks.push_back(
        check_flag("km_fixed_point_found", km.fixed_point.has_value(), km.residual, opt.km_tol));
    return rep;
  }
  if (!(eps > 0.0)) throw DomainError("eps must be positive");

  const Vec& x0 = cert.x0;
  const int n = terms_for_tail(eps);
  double M = 0.0;
  std::vector<Anchor> anchors;
  for (int j = 1; j <= n; ++j) {
    const Vec t = theta.term(j);
    const Vec ft = f->evaluate(t);
    const Vec tr = t - x0;
    const Vec ftr = ft - x0;
    M = std::max({M, tr.norm(), ftr.norm()});
    bool dup = false;
    for (const Anchor& a : anchors)
      if ((a.x - tr).norm() < 1e-10) dup = true;
    if (!dup) anchors.push_back({tr, ftr});
  }
  const double lambda = M > 0.0 ? 2.0 * M : 1.0;
  const CoveringParameters cp = covering_parameters(cert.alpha, cert.beta, lambda);
  const double delta = (cp.r_prime - cp.r) / 3.0;
  const double eta = delta;

  const std::vector<Vec> net = net_on_far_sphere(*body, x0, cert.F, cp.t, lambda, delta);
  std::vector<Vec> net_sites;
  for (const Vec& v : net) {
    const Vec site = body->project(v + x0) - x0;
    bool dup = false;
    for (const Anchor& a : anchors)
      if ((a.x - site).norm() < 1e-10) dup = true;
    if (!dup) {
      anchors.push_back({site, Vec::Zero(site.size())});
      net_sites.push_back(site);
    }
  }

  SampledMap anchor_map;
  try {
    anchor_map = SampledMap(anchors);
  } catch (const InfeasibleExtension& e) {
    throw CertificateViolation(
        std::string("anchor data failed nonexpansiveness validation; "
                    "certificate and lambda are inconsistent: ") +
        e.what());
  }
  const BodyPtr recentered = x0.norm() == 0.0
                                 ? body
                                 : std::make_shared<TranslatedBody>(body, Vec(-x0));
  const MapPtr extension = std::make_shared<SampledExtensionMap>(
      std::move(anchor_map), std::make_shared<FullSpace>(body->ambient_dim()));
  const MapPtr g_centered = compose({projection_map(recentered), extension});
  rep.perturbed = conjugate_by_shift(g_centered, x0, body);

  rep.parameters = Json{{"eps", eps},
                        {"n", n},
                        {"M", M},
                        {"lambda", lambda},
                        {"t", cp.t},
                        {"r", cp.r},
                        {"r_prime", cp.r_prime},
                        {"delta", delta},
                        {"eta", eta},
                        {"net_size", static_cast<int>(net_sites.size())},
                        {"anchors", static_cast<int>(anchors.size())}};

  // Fixed evaluation order keeps the anchor log, and hence the report,
  // reproducible: net images, then the averaged iteration, then the
  // invariance sample, then the metric.
  double worst_net = 0.0;
  for (const Vec& site : net_sites)
    worst_net = std::max(worst_net, (rep.perturbed->evaluate(site + x0) - x0).norm());
  rep.checks.push_back(PostCheck{"net_maps_near_zero", worst_net < eta, worst_net, eta});

  const KmResult km = km_fixed_point(*rep.perturbed, x0, opt.km_tol, opt.km_max_iter);
  rep.checks.push_back(
      check_flag("km_fixed_point_found", km.fixed_point.has_value(), km.residual, opt.km_tol));
  if (km.fixed_point)
    rep.checks.push_back(
        check_leq("km_point_in_slab", (*km.fixed_point - x0).norm(), cp.r_prime + 1e-9));
  rep.parameters["km_iterations"] = km.iterations;

  Rng rng(opt.rng_seed);
  double worst_escape = -kInf;
  for (int i = 0; i < opt.invariance_samples; ++i) {
    const Vec x = sample_in_ball_intersection(*body, rng, x0, cp.r_prime);
    worst_escape = std::max(worst_escape, (rep.perturbed->evaluate(x) - x0).norm() - cp.r_prime);
  }
  rep.checks.push_back(check_leq("slab_invariance_escape", worst_escape, 1e-7));

  rep.metric_distance = d_theta(*f, *rep.perturbed, theta, std::max(opt.metric_terms, n));
  rep.checks.push_back(check_leq("metric_within_eps", rep.metric_distance.upper(), eps));
  return rep;
}

PerturbationReport build_boundary_drift(const MapPtr& f, double delta, int p,
                                        const ThetaSequence& theta, const BodyPtr& body,
                                        const SBCertificate& cert,
                                        const BoundaryDriftOptions& opt) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (p < 1) throw DomainError("p is a 1-based term index");
  const int d = body->ambient_dim();
  if (!body->contains(Vec::Zero(d), 1e-9))
    throw DomainError("construction expects 0 in the body");

  const int n = terms_for_tail(delta / 2.0);
  const int m = std::max(n, p);
  std::vector<Vec> pts;
  std::vector<Vec> span_seed;
  for (int c = 0; c < cert.F.dim(); ++c) span_seed.push_back(cert.F.basis().col(c));
  for (int j = 1; j <= m; ++j) {
    const Vec t = theta.term(j);
    const Vec ft = f->evaluate(t);
    pts.push_back(t);
    pts.push_back(ft);
    span_seed.push_back(t);
    span_seed.push_back(ft);
  }
  const Subspace G = orthonormalize(span_seed, d);
  if (G.dim() >= d)
    throw ConstructionError(
        "no orthogonal drift direction left; increase the ambient dimension");
  const Vec y0 = G.complement().basis().col(0);

  const BodyPtr hull = std::make_shared<PolytopeHull>(pts);
  const MapPtr g = compose({projection_map(hull), f, projection_map(hull)});
  const double c = delta / 2.0;
  const auto h_node = std::make_shared<OrthogonalShiftMap>(g, y0, c, body);
  PerturbationReport rep;
  rep.perturbed = h_node;

  // Largest ray extent along y0 over the hull: vertices plus seeded
  // barycentric samples (the extent is concave over the hull).
  double M_D = 0.0;
  Rng rng(opt.rng_seed);
  std::vector<Vec> probes = pts;
  {
    const int verts = static_cast<int>(pts.size());
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 256; ++i) {
      Vec w(verts);
      for (int j = 0; j < verts; ++j) w[j] = -std::log(u01(rng) + 1e-300);
      w /= w.sum();
      Vec x = Vec::Zero(d);
      for (int j = 0; j < verts; ++j) x += w[j] * pts[static_cast<size_t>(j)];
      probes.push_back(x);
    }
  }
  for (const Vec& x : probes) M_D = std::max(M_D, body->ray_max(x, y0));
  if (!std::isfinite(M_D))
    throw ConstructionError(
        "body is unbounded along the drift direction; certificate subspace too small");
  const long k_budget = static_cast<long>(std::ceil(2.0 * M_D / delta)) + 1;

  rep.parameters = Json{{"delta", delta}, {"p", p},           {"n", n},
                        {"m", m},         {"dim_G", G.dim()}, {"M_D", finite_or_tag(M_D)},
                        {"k_budget", k_budget}, {"y0", vec_to_json(y0)}};

  // Anchor shift bound ||h(theta_j) - f(theta_j)|| <= delta/2.
  double worst_anchor = 0.0;
  for (int j = 1; j <= m; ++j) {
    const Vec t = theta.term(j);
    worst_anchor =
        std::max(worst_anchor, (h_node->evaluate(t) - f->evaluate(t)).norm());
  }
  rep.checks.push_back(check_leq("anchor_shift_bound", worst_anchor, c + 1e-9));

  // Orbit of theta_p: drift identity while the projection stays inactive,
  // boundary distance along the way.
  const Vec start = theta.term(p);
  double drift_dev = 0.0;
  long k_reached = -1;
  long clamp_step = -1;
  {
    double dist = body->boundary_distance(start);
    if (dist < opt.boundary_tol) k_reached = 0;
    Vec xh = start, xg = start;
    for (long k = 1; k <= k_budget && k_reached < 0; ++k) {
      const Vec arg = h_node->pre_projection_argument(xh);
      const bool clamped = !body->contains(arg, 1e-12);
      if (clamped && clamp_step < 0) clamp_step = k;
      xh = body->project(arg);
      xg = g->evaluate(xg);
      if (clamp_step < 0) {
        const Vec predicted = xg + (static_cast<double>(k) * c) * y0;
        drift_dev = std::max(drift_dev, (xh - predicted).norm());
      }
      dist = body->boundary_distance(xh);
      if (dist < opt.boundary_tol) k_reached = k;
    }
  }
  rep.checks.push_back(check_leq("interior_drift_identity", drift_dev, 1e-9));
  rep.checks.push_back(check_flag("boundary_reached", k_reached >= 0,
                                  static_cast<double>(k_reached),
                                  static_cast<double>(k_budget)));
  rep.parameters["k_reached"] = k_reached;
  rep.parameters["projection_activated_at"] = clamp_step;

  rep.metric_distance = d_theta(*f, *rep.perturbed, theta, std::max(opt.metric_terms, m));
  rep.checks.push_back(check_leq("metric_within_delta", rep.metric_distance.upper(), delta));
  return rep;
}

PerturbationReport build_drift_perturbation(const MapPtr& f, double eps, double r,
                                            const ThetaSequence& theta,
                                            const BodyPtr& body, const DriftOptions& opt) {
  if (!(eps > 0.0) || !(r > 0.0)) throw DomainError("eps and r must be positive");
  const int d = body->ambient_dim();
  if (!body->contains(Vec::Zero(d), 1e-9))
    throw DomainError("construction expects 0 in the body");

  const int n = terms_for_tail(eps / 2.0);
  std::vector<Vec> anchors;
  for (int j = 1; j <= n; ++j) {
    const Vec t = theta.term(j);
    anchors.push_back(t);
    anchors.push_back(f->evaluate(t));
  }
  const Subspace F = orthonormalize(anchors, d);

  // Chebyshev-style center of the anchor hull: deepest of the centroid
  // and seeded hull samples (centroid first, so full-space ties keep it).
  Vec x0 = Vec::Zero(d);
  for (const Vec& a : anchors) x0 += a;
  x0 /= static_cast<double>(anchors.size());
  {
    Rng rng(opt.rng_seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double best = body->boundary_distance(x0);
    for (int i = 0; i < 256; ++i) {
      Vec w(static_cast<int>(anchors.size()));
      for (int j = 0; j < w.size(); ++j) w[j] = -std::log(u01(rng) + 1e-300);
      w /= w.sum();
      Vec cand = Vec::Zero(d);
      for (int j = 0; j < w.size(); ++j) cand += w[j] * anchors[static_cast<size_t>(j)];
      const double depth = body->boundary_distance(cand);
      if (depth > best) {
        best = depth;
        x0 = cand;
      }
    }
  }

  double rho = 0.0;
  for (const Vec& a : anchors) rho = std::max(rho, (a - x0).norm());
  const double delta = rho > 0.0 ? 0.5 * std::min(1.0, eps / (8.0 * rho)) : 0.5;

  const std::optional<Vec> y0 = body->unbounded_direction(F);
  if (!y0)
    throw ConstructionError(
        "body offers no unbounded direction orthogonal to the anchor span");
  if (!body->contains(x0 + (3.0 * r / delta) * (*y0), 1e-9))
    throw ConstructionError(
        "membership check failed: x0 + (3r/delta) y0 must lie in the body");

  if (12.0 * r / eps > 1e8) throw DomainError("eps too small for the drift budget");
  const int k = static_cast<int>(std::floor(12.0 * r / eps)) + 1;
  std::vector<Vec> scaled;
  scaled.reserve(anchors.size());
  for (const Vec& a : anchors) scaled.push_back(delta * x0 + (1.0 - delta) * a);
  const BodyPtr hull = std::make_shared<PolytopeHull>(scaled);
  const MapPtr g = compose({projection_map(hull), f, projection_map(hull)});
  const double drift = 3.0 * r / k;
  const auto h_node = std::make_shared<OrthogonalShiftMap>(g, *y0, drift, body);

  PerturbationReport rep;
  rep.perturbed = h_node;
  rep.parameters = Json{{"eps", eps},     {"r", r},
                        {"n", n},         {"dim_F", F.dim()},
                        {"x0", vec_to_json(x0)}, {"rho", rho},
                        {"delta", delta}, {"k", k},
                        {"y0", vec_to_json(*y0)}, {"per_step_drift", drift}};

  Vec xh = Vec::Zero(d), xg = Vec::Zero(d);
  for (int j = 0; j < k; ++j) {
    xh = h_node->evaluate(xh);
    xg = g->evaluate(xg);
  }
  const double lhs = xh.squaredNorm();
  const double rhs = xg.squaredNorm() + 9.0 * r * r;
  rep.checks.push_back(check_leq("orthogonal_drift_identity", std::abs(lhs - rhs), 1e-6));
  rep.checks.push_back(check_flag("norm_lower_bound", xh.norm() >= 3.0 * r - 1e-6,
                                  xh.norm(), 3.0 * r - 1e-6));

  const ExclusionCertificate cert = exclusion_ball(*iterate_map(h_node, k), Vec::Zero(d), r);
  rep.checks.push_back(
      check_flag("exclusion_certificate", cert.issued, cert.residual, 2.0 * r));

  rep.metric_distance = d_theta(*f, *rep.perturbed, theta, std::max(opt.metric_terms, n));
  rep.checks.push_back(check_leq("metric_within_eps", rep.metric_distance.upper(), eps));
  return rep;
}

}  // namespace fplab
