#include "fplab/bodies.hpp"

#include <algorithm>
#include <cmath>

#include "fplab/simplex_qp.hpp"

namespace fplab {
namespace {

// Unit vector in span(A) forming a near-zero principal angle with span(B),
// i.e. a direction of the intersection, when one exists.
std::optional<Vec> intersection_direction(const Subspace& A, const Subspace& B) {
  if (A.dim() == 0 || B.dim() == 0) return std::nullopt;
  Mat M = A.basis().transpose() * B.basis();
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
  if (svd.singularValues().size() == 0) return std::nullopt;
  if (svd.singularValues()(0) < 1.0 - 1e-9) return std::nullopt;
  Vec u = A.basis() * svd.matrixU().col(0);
  return u / u.norm();
}

double solve_quadratic_extent(double a, double b, double c) {
  // Largest t >= 0 with a t^2 + 2 b t + c <= 0, given c <= 0 (x inside).
  if (a <= 1e-24) {
    if (b <= 1e-15) return kInf;
    return std::max(0.0, -c / (2.0 * b));
  }
  const double disc = b * b - a * c;
  if (disc <= 0.0) return 0.0;
  return std::max(0.0, (-b + std::sqrt(disc)) / a);
}

}  // namespace

void ConvexBody::require_inside(const Vec& x, double tol) const {
  if (x.size() != ambient_dim())
    throw DomainError("point dimension does not match the body");
  if (!contains(x, tol)) throw DomainError("point lies outside the body");
}

void ConvexBody::require_unit(const Vec& u) const {
  if (u.size() != ambient_dim() || std::abs(u.norm() - 1.0) > 1e-9)
    throw DomainError("ray_max: direction must be a unit vector");
}

double ConvexBody::ray_max(const Vec& x, const Vec& u) const {
  require_inside(x);
  require_unit(u);
  double lo = 0.0, hi = 1.0;
  while (contains(x + hi * u, 1e-12)) {
    lo = hi;
    hi *= 2.0;
    if (hi > kRayHorizon) return kInf;
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (contains(x + mid * u, 1e-12) ? lo : hi) = mid;
  }
  return lo;
}

double ConvexBody::boundary_distance(const Vec& x) const {
  require_inside(x);
  // Documented sampling default: least ray extent over seeded directions.
  Rng rng(0x5eedULL);
  double best = kInf;
  for (int i = 0; i < 256; ++i) {
    const Vec u = unit_vec(rng, ambient_dim());
    best = std::min(best, ray_max(x, u));
    if (best <= 0.0) return 0.0;
  }
  return best;
}

std::optional<Vec> ConvexBody::unbounded_direction(const Subspace& F) const {
  const Subspace comp = F.dim() == 0
                            ? Subspace(Mat::Identity(ambient_dim(), ambient_dim()))
                            : F.complement();
  if (comp.dim() == 0) return std::nullopt;
  const Vec p = interior_point();
  for (int j = 0; j < comp.dim(); ++j) {
    for (double sign : {1.0, -1.0}) {
      const Vec u = sign * comp.basis().col(j);
      if (ray_max(p, u) == kInf) return u;
    }
  }
  Rng rng(0xd1cULL);
  for (int i = 0; i < 64; ++i) {
    const Vec u = unit_vec_in(rng, comp);
    if (ray_max(p, u) == kInf) return u;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Ball

Ball::Ball(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius_ > 0.0)) throw DomainError("ball radius must be positive");
  if (!is_finite(center_)) throw DomainError("ball center must be finite");
}

bool Ball::contains(const Vec& x, double tol) const {
  return (x - center_).norm() <= radius_ + tol;
}

Vec Ball::project(const Vec& x) const {
  const Vec d = x - center_;
  const double n = d.norm();
  if (n <= radius_) return x;
  return center_ + (radius_ / n) * d;
}

double Ball::boundary_distance(const Vec& x) const {
  require_inside(x);
  return std::max(0.0, radius_ - (x - center_).norm());
}

double Ball::ray_max(const Vec& x, const Vec& u) const {
  require_inside(x);
  require_unit(u);
  const Vec d = x - center_;
  return solve_quadratic_extent(1.0, d.dot(u), d.squaredNorm() - radius_ * radius_);
}

Json Ball::to_json() const {
  return Json{{"kind", "ball"}, {"center", vec_to_json(center_)}, {"radius", radius_}};
}

// ---------------------------------------------------------------------------
// Tube

Tube::Tube(Subspace axis, double radius) : axis_(std::move(axis)), radius_(radius) {
  if (!(radius_ > 0.0)) throw DomainError("tube radius must be positive");
}

bool Tube::contains(const Vec& x, double tol) const {
  return axis_.reject(x).norm() <= radius_ + tol;
}

Vec Tube::project(const Vec& x) const {
  const Vec perp = axis_.reject(x);
  const double n = perp.norm();
  if (n <= radius_) return x;
  return (x - perp) + (radius_ / n) * perp;
}

double Tube::boundary_distance(const Vec& x) const {
  require_inside(x);
  return std::max(0.0, radius_ - axis_.reject(x).norm());
}

double Tube::ray_max(const Vec& x, const Vec& u) const {
  require_inside(x);
  require_unit(u);
  const Vec xp = axis_.reject(x);
  const Vec up = axis_.reject(u);
  return solve_quadratic_extent(up.squaredNorm(), xp.dot(up),
                                xp.squaredNorm() - radius_ * radius_);
}

std::optional<Vec> Tube::unbounded_direction(const Subspace& F) const {
  if (F.dim() == 0) {
    if (axis_.dim() == 0) return std::nullopt;
    return axis_.basis().col(0);
  }
  return intersection_direction(axis_, F.complement());
}

Json Tube::to_json() const {
  return Json{{"kind", "tube"}, {"subspace", basis_to_json(axis_)}, {"radius", radius_}};
}

// ---------------------------------------------------------------------------
// BluntCone

BluntCone::BluntCone(Subspace F, double alpha, double beta)
    : F_(std::move(F)), alpha_(alpha), beta_(beta) {
  if (!(alpha_ > 0.0) || !(beta_ > 0.0))
    throw DomainError("blunt cone needs alpha > 0 and beta > 0");
  if (F_.dim() == 0) throw DomainError("blunt cone needs dim F >= 1");
}

bool BluntCone::contains(const Vec& x, double tol) const {
  const double a = F_.project(x).norm();
  const double b = F_.reject(x).norm();
  return b - beta_ - (beta_ / alpha_) * a <= tol;
}

Vec BluntCone::project(const Vec& x) const {
  if (contains(x, 0.0)) return x;
  const Vec xf = F_.project(x);
  const Vec xp = x - xf;
  const double a0 = xf.norm();
  const double b0 = xp.norm();  // > beta here, so b0 > 0
  const double kappa = beta_ / alpha_;
  // Project (a0, b0) onto { b - kappa a <= beta } in the radial plane.
  const double viol = b0 - kappa * a0 - beta_;
  double a1 = a0 + viol * kappa / (1.0 + kappa * kappa);
  double b1 = b0 - viol / (1.0 + kappa * kappa);
  if (a1 < 0.0) {
    a1 = 0.0;
    b1 = beta_;
  }
  const Vec fdir = a0 > 1e-14 ? Vec(xf / a0) : Vec(F_.basis().col(0));
  return a1 * fdir + (b1 / b0) * xp;
}

std::optional<Vec> BluntCone::unbounded_direction(const Subspace& F) const {
  if (F.dim() == 0) return F_.basis().col(0);
  return intersection_direction(F_, F.complement());
}

Json BluntCone::to_json() const {
  return Json{{"kind", "blunt_cone"},
              {"subspace", basis_to_json(F_)},
              {"alpha", alpha_},
              {"beta", beta_}};
}

// ---------------------------------------------------------------------------
// HalfspaceIntersection

HalfspaceIntersection::HalfspaceIntersection(std::vector<Halfspace> faces,
                                             std::optional<Vec> interior,
                                             bool bounded)
    : faces_(std::move(faces)), interior_(std::move(interior)), bounded_(bounded) {
  if (faces_.empty()) throw DomainError("halfspace intersection needs >= 1 face");
  for (auto& f : faces_) {
    const double n = f.normal.norm();
    if (n < 1e-12) throw DomainError("halfspace normal must be nonzero");
    f.offset /= n;
    f.normal /= n;
  }
}

bool HalfspaceIntersection::contains(const Vec& x, double tol) const {
  for (const auto& f : faces_)
    if (f.normal.dot(x) - f.offset > tol) return false;
  return true;
}

Vec HalfspaceIntersection::project(const Vec& x) const {
  if (contains(x, 0.0)) return x;
  if (faces_.size() == 1) {
    const auto& f = faces_[0];
    return x - (f.normal.dot(x) - f.offset) * f.normal;
  }
  // Dykstra's cyclic scheme with per-face correction vectors.
  const size_t m = faces_.size();
  Vec y = x;
  std::vector<Vec> corr(m, Vec::Zero(x.size()));
  const int max_sweeps = 100000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const Vec z = y + corr[i];
      const auto& f = faces_[i];
      const double excess = std::max(0.0, f.normal.dot(z) - f.offset);
      const Vec ynew = z - excess * f.normal;
      moved += (ynew - y).norm();
      corr[i] = z - ynew;
      y = ynew;
    }
    if (moved <= 1e-12 * (1.0 + y.norm())) break;
  }
  double worst = 0.0;
  for (const auto& f : faces_) worst = std::max(worst, f.normal.dot(y) - f.offset);
  if (worst > 1e-8)
    throw ConvergenceError("Dykstra projection did not converge", worst);
  return y;
}

double HalfspaceIntersection::boundary_distance(const Vec& x) const {
  require_inside(x);
  double best = kInf;
  for (const auto& f : faces_) best = std::min(best, f.offset - f.normal.dot(x));
  return std::max(0.0, best);
}

double HalfspaceIntersection::ray_max(const Vec& x, const Vec& u) const {
  require_inside(x);
  require_unit(u);
  double best = kInf;
  for (const auto& f : faces_) {
    const double du = f.normal.dot(u);
    if (du > 1e-15) best = std::min(best, (f.offset - f.normal.dot(x)) / du);
  }
  return std::max(0.0, best);
}

Vec HalfspaceIntersection::interior_point() const {
  if (interior_) return *interior_;
  return project(Vec::Zero(ambient_dim()));
}

Json HalfspaceIntersection::to_json() const {
  Json fs = Json::array();
  for (const auto& f : faces_)
    fs.push_back(Json{{"normal", vec_to_json(f.normal)}, {"offset", f.offset}});
  Json j{{"kind", "halfspaces"}, {"faces", fs}};
  if (interior_) j["interior"] = vec_to_json(*interior_);
  if (bounded_) j["bounded"] = true;
  return j;
}

// ---------------------------------------------------------------------------
// SolidParaboloid

namespace {

// Minimizes g(t) = (t^2 - p)^2 + (t - q)^2 over t >= 0 for q >= 0.
// Stationary points solve h(t) = 2 t^3 + (1 - 2p) t - q = 0.
double paraboloid_argmin(double p, double q) {
  const auto h = [&](double t) { return 2.0 * t * t * t + (1.0 - 2.0 * p) * t - q; };
  const auto g = [&](double t) {
    const double s = t * t - p;
    const double w = t - q;
    return s * s + w * w;
  };
  const double T = 2.0 + 2.0 * std::cbrt(std::max(q, 0.0)) +
                   2.0 * std::sqrt(std::max(0.0, 2.0 * p - 1.0)) +
                   2.0 * std::sqrt(std::max(p, 0.0)) + q;
  std::vector<std::pair<double, double>> brackets;
  if (1.0 - 2.0 * p >= 0.0) {
    brackets.emplace_back(0.0, T);  // h monotone increasing
  } else {
    const double tc = std::sqrt((2.0 * p - 1.0) / 6.0);
    for (auto [lo, hi] : {std::pair{0.0, tc}, std::pair{tc, T}})
      if (h(lo) * h(hi) <= 0.0) brackets.emplace_back(lo, hi);
    if (brackets.empty()) brackets.emplace_back(0.0, T);
  }
  double best_t = 0.0, best_g = g(0.0);
  for (auto [lo, hi] : brackets) {
    if (h(lo) > 0.0 && h(hi) > 0.0) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) <= 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    if (g(t) < best_g) {
      best_g = g(t);
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

SolidParaboloid::SolidParaboloid(int dim) : dim_(dim) {
  if (dim_ < 2) throw DomainError("paraboloid needs ambient dimension >= 2");
}

bool SolidParaboloid::contains(const Vec& x, double tol) const {
  return x[0] - x.tail(dim_ - 1).squaredNorm() >= -tol;
}

Vec SolidParaboloid::project(const Vec& x) const {
  if (contains(x, 0.0)) return x;
  const double p = x[0];
  const Vec tail = x.tail(dim_ - 1);
  const double q = tail.norm();
  const double t = paraboloid_argmin(p, q);
  Vec y = Vec::Zero(dim_);
  y[0] = t * t;
  if (q > 1e-14) y.tail(dim_ - 1) = (t / q) * tail;
  return y;
}

double SolidParaboloid::boundary_distance(const Vec& x) const {
  require_inside(x);
  const double p = x[0];
  Vec tail = x.tail(dim_ - 1);
  double q = tail.norm();
  if (q < 1e-14) {
    tail = Vec::Unit(dim_ - 1, 0);  // on-axis: value is rotation-invariant
    q = 0.0;
  }
  const double t = paraboloid_argmin(p, q);
  const double s = t * t - p;
  const double w = t - q;
  return std::sqrt(s * s + w * w);
}

double SolidParaboloid::ray_max(const Vec& x, const Vec& u) const {
  require_inside(x);
  require_unit(u);
  const Vec xp = x.tail(dim_ - 1);
  const Vec up = u.tail(dim_ - 1);
  // (x1 + t u1) >= ||xp + t up||^2  <=>  a t^2 + 2 b t + c <= 0
  const double a = up.squaredNorm();
  const double b = xp.dot(up) - 0.5 * u[0];
  const double c = xp.squaredNorm() - x[0];
  return solve_quadratic_extent(a, b, std::min(c, 0.0));
}

std::optional<Vec> SolidParaboloid::unbounded_direction(const Subspace& F) const {
  const Vec axis = Vec::Unit(dim_, 0);
  if (F.dim() == 0 || F.project(axis).norm() <= 1e-12) return axis;
  return std::nullopt;
}

Vec SolidParaboloid::interior_point() const {
  Vec p = Vec::Zero(dim_);
  p[0] = 1.0;
  return p;
}

Json SolidParaboloid::to_json() const {
  return Json{{"kind", "paraboloid"}, {"dim", dim_}};
}

// ---------------------------------------------------------------------------
// TranslatedBody / FullSpace / PolytopeHull

TranslatedBody::TranslatedBody(BodyPtr base, Vec shift)
    : base_(std::move(base)), shift_(std::move(shift)) {
  if (!base_) throw DomainError("translated body needs a base");
  if (shift_.size() != base_->ambient_dim())
    throw DomainError("translation shift dimension mismatch");
}

Json TranslatedBody::to_json() const {
  return Json{{"kind", "translate"}, {"shift", vec_to_json(shift_)}, {"base", base_->to_json()}};
}

std::optional<Vec> FullSpace::unbounded_direction(const Subspace& F) const {
  if (F.dim() == 0) return Vec::Unit(dim_, 0);
  const Subspace comp = F.complement();
  if (comp.dim() == 0) return std::nullopt;
  return comp.basis().col(0);
}

Json FullSpace::to_json() const { return Json{{"kind", "full_space"}, {"dim", dim_}}; }

PolytopeHull::PolytopeHull(std::vector<Vec> vertices) {
  if (vertices.empty()) throw DomainError("hull needs >= 1 vertex");
  verts_.resize(vertices[0].size(), static_cast<int>(vertices.size()));
  for (size_t j = 0; j < vertices.size(); ++j) {
    if (vertices[j].size() != verts_.rows())
      throw DomainError("hull vertices of unequal dimension");
    verts_.col(static_cast<int>(j)) = vertices[j];
  }
}

bool PolytopeHull::contains(const Vec& x, double tol) const {
  return (project(x) - x).norm() <= tol;
}

Vec PolytopeHull::project(const Vec& x) const {
  if (verts_.cols() == 1) return verts_.col(0);
  return project_onto_hull(verts_, x);
}

Json PolytopeHull::to_json() const {
  Json vs = Json::array();
  for (int j = 0; j < verts_.cols(); ++j) vs.push_back(vec_to_json(verts_.col(j)));
  return Json{{"kind", "hull"}, {"vertices", vs}};
}

// ---------------------------------------------------------------------------
// JSON factory and samplers

BodyPtr body_from_json(const Json& spec, const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where, "expected a body object");
  if (!spec.contains("kind") || !spec["kind"].is_string())
    throw ConfigError(where + "/kind", "missing body kind");
  const std::string kind = spec["kind"].get<std::string>();
  const auto need = [&](const char* field) -> const Json& {
    if (!spec.contains(field))
      throw ConfigError(where + "/" + field, "missing required field");
    return spec[field];
  };
  if (kind == "ball")
    return std::make_shared<Ball>(vec_from_json(need("center"), where + "/center"),
                                  need("radius").get<double>());
  if (kind == "tube")
    return std::make_shared<Tube>(subspace_from_json(need("subspace"), where + "/subspace"),
                                  need("radius").get<double>());
  if (kind == "blunt_cone")
    return std::make_shared<BluntCone>(
        subspace_from_json(need("subspace"), where + "/subspace"),
        need("alpha").get<double>(), need("beta").get<double>());
  if (kind == "halfspaces") {
    const Json& fs = need("faces");
    if (!fs.is_array() || fs.empty())
      throw ConfigError(where + "/faces", "expected a non-empty array");
    std::vector<Halfspace> faces;
    for (size_t i = 0; i < fs.size(); ++i) {
      const std::string fw = where + "/faces/" + std::to_string(i);
      faces.push_back(Halfspace{vec_from_json(fs[i].at("normal"), fw + "/normal"),
                                fs[i].at("offset").get<double>()});
    }
    std::optional<Vec> interior;
    if (spec.contains("interior"))
      interior = vec_from_json(spec["interior"], where + "/interior");
    const bool bounded = spec.value("bounded", false);
    return std::make_shared<HalfspaceIntersection>(std::move(faces), interior, bounded);
  }
  if (kind == "paraboloid") return std::make_shared<SolidParaboloid>(need("dim").get<int>());
  if (kind == "translate")
    return std::make_shared<TranslatedBody>(body_from_json(need("base"), where + "/base"),
                                            vec_from_json(need("shift"), where + "/shift"));
  if (kind == "full_space") return std::make_shared<FullSpace>(need("dim").get<int>());
  if (kind == "hull") {
    const Json& vs = need("vertices");
    if (!vs.is_array() || vs.empty())
      throw ConfigError(where + "/vertices", "expected a non-empty array");
    std::vector<Vec> verts;
    for (size_t i = 0; i < vs.size(); ++i)
      verts.push_back(vec_from_json(vs[i], where + "/vertices/" + std::to_string(i)));
    return std::make_shared<PolytopeHull>(std::move(verts));
  }
  throw ConfigError(where + "/kind", "unknown body kind '" + kind + "'");
}

Vec sample_in_body(const ConvexBody& body, Rng& rng, double radius) {
  return body.project(uniform_in_ball(rng, body.interior_point(), radius));
}

Vec sample_in_ball_intersection(const ConvexBody& body, Rng& rng, const Vec& center,
                                double radius, long max_tries) {
  if (dynamic_cast<const FullSpace*>(&body)) return uniform_in_ball(rng, center, radius);
  if (const auto* tr = dynamic_cast<const TranslatedBody*>(&body))
    return tr->shift() + sample_in_ball_intersection(*tr->base(), rng,
                                                     Vec(center - tr->shift()), radius,
                                                     max_tries);
  if (const auto* tube = dynamic_cast<const Tube*>(&body)) {
    const Subspace& F = tube->axis();
    const Subspace comp = F.complement();
    const Vec cf = F.basis().transpose() * center;
    const Vec cp = comp.basis().transpose() * center;
    for (long tries = 0; tries < max_tries; ++tries) {
      const Vec a = uniform_in_ball(rng, cf, radius);
      const Vec b = uniform_in_ball(rng, Vec::Zero(comp.dim()), tube->radius());
      if ((a - cf).squaredNorm() + (b - cp).squaredNorm() <= radius * radius)
        return F.basis() * a + comp.basis() * b;
    }
    throw ConvergenceError("tube-ball sampler exhausted its tries", radius);
  }
  for (long tries = 0; tries < max_tries; ++tries) {
    const Vec x = uniform_in_ball(rng, center, radius);
    if (body.contains(x, 0.0)) return x;
  }
  throw ConvergenceError("rejection sampler exhausted its tries", radius);
}

}  // namespace fplab
