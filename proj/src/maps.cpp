#include "fplab/maps.hpp"

#include <algorithm>
#include <cmath>

#include "fplab/simplex_qp.hpp"

namespace fplab {

// ---------------------------------------------------------------------------
// SampledMap

SampledMap::SampledMap(const std::vector<Anchor>& seed, double pair_tol)
    : pair_tol_(pair_tol) {
  if (seed.empty()) throw DomainError("sampled map needs at least one anchor");
  const int d = static_cast<int>(seed[0].x.size());
  X_.resize(d, static_cast<int>(seed.size()));
  Y_.resize(d, static_cast<int>(seed.size()));
  for (const Anchor& a : seed) {
    if (a.x.size() != d || a.y.size() != d)
      throw DomainError("anchor dimension mismatch");
    append(a.x, a.y, pair_tol_);
  }
}

void SampledMap::append(const Vec& x, const Vec& y, double pair_tol) {
  for (int i = 0; i < count_; ++i) {
    const double dx = (X_.col(i) - x).norm();
    const double dy = (Y_.col(i) - y).norm();
    if (dy > dx + pair_tol)
      throw InfeasibleExtension("anchor data is not 1-Lipschitz", dy - dx);
  }
  if (count_ == X_.cols()) {
    const int cap = std::max(8, 2 * count_);
    X_.conservativeResize(Eigen::NoChange, cap);
    Y_.conservativeResize(Eigen::NoChange, cap);
  }
  X_.col(count_) = x;
  Y_.col(count_) = y;
  y_norm2_.push_back(y.squaredNorm());
  ++count_;
}

std::vector<Anchor> SampledMap::log() const {
  std::vector<Anchor> out;
  out.reserve(static_cast<size_t>(count_));
  for (int i = 0; i < count_; ++i) out.push_back({X_.col(i), Y_.col(i)});
  return out;
}

double SampledMap::objective(const Vec& query, const Vec& y) const {
  double phi = -kInf;
  for (int i = 0; i < count_; ++i)
    phi = std::max(phi, (y - Y_.col(i)).norm() - (query - X_.col(i)).norm());
  return phi;
}

double SampledMap::worst_pair_ratio() const {
  double worst = 0.0;
  for (int i = 0; i < count_; ++i)
    for (int j = i + 1; j < count_; ++j) {
      const double dx = (X_.col(i) - X_.col(j)).norm();
      if (dx < 1e-12) continue;
      worst = std::max(worst, (Y_.col(i) - Y_.col(j)).norm() / dx);
    }
  return worst;
}

Vec SampledMap::extend(const Vec& query) {
  if (query.size() != ambient_dim())
    throw DomainError("extension query dimension mismatch");
  const auto X = X_.leftCols(count_);
  const auto Y = Y_.leftCols(count_);

  Vec r2 = (X.colwise() - query).colwise().squaredNorm().transpose();
  int nearest = 0;
  const double r2min = r2.minCoeff(&nearest);
  if (r2min < 1e-20) return Y_.col(nearest);  // near-duplicate: stored value

  // The squared-slack relaxation max_i(||y - y_i||^2 - r_i^2) is strongly
  // convex with the same feasible set; its dual is a simplex QP over the
  // anchor values and its optimum lies in the ball intersection whenever
  // the anchor data is 1-Lipschitz.
  Vec d(count_);
  for (int i = 0; i < count_; ++i) d[i] = y_norm2_[static_cast<size_t>(i)] - r2[i];
  const Vec mu = simplex_qp(Y, d);
  Vec y = Y * mu;

  double phi = objective(query, y);
  if (phi > 0.0) {
    // Projection cleanup onto the most violated ball; consistent data
    // leaves at most roundoff to absorb here.
    for (int it = 0; it < 256 && phi > 0.0; ++it) {
      int worst = 0;
      double worst_slack = -kInf;
      for (int i = 0; i < count_; ++i) {
        const double s = (y - Y.col(i)).norm() - std::sqrt(r2[i]);
        if (s > worst_slack) {
          worst_slack = s;
          worst = i;
        }
      }
      const Vec diff = y - Y.col(worst);
      const double n = diff.norm();
      if (n < 1e-18) break;
      y = Y.col(worst) + (std::sqrt(r2[worst]) / n) * diff;
      phi = objective(query, y);
    }
  }
  if (phi > 1e-8)
    throw InfeasibleExtension("ball intersection infeasible; anchor data corrupted", phi);

  append(query, y, pair_tol_);
  return y;
}

// ---------------------------------------------------------------------------
// Plain nodes

AffineMap::AffineMap(std::optional<Mat> A, Vec b, BodyPtr domain)
    : A_(std::move(A)), b_(std::move(b)), domain_(std::move(domain)) {
  if (!domain_) throw ConstructionError("affine map needs a domain");
  if (b_.size() != domain_->ambient_dim())
    throw ConstructionError("affine offset dimension mismatch");
  if (A_) {
    if (A_->rows() != b_.size() || A_->cols() != b_.size())
      throw ConstructionError("affine matrix shape mismatch");
    Eigen::JacobiSVD<Mat> svd(*A_);
    if (svd.singularValues()(0) > 1.0 + 1e-12)
      throw ConstructionError("affine matrix has spectral norm above 1");
  }
}

Vec AffineMap::evaluate(const Vec& x) const {
  if (A_) return (*A_) * x + b_;
  return x + b_;
}

Json AffineMap::to_json() const {
  Json j{{"kind", "affine"}};
  if (A_) {
    Json rows = Json::array();
    for (int r = 0; r < A_->rows(); ++r) rows.push_back(vec_to_json(A_->row(r).transpose()));
    j["matrix"] = rows;
  }
  j["offset"] = vec_to_json(b_);
  return j;
}

ConstantMap::ConstantMap(Vec value, BodyPtr domain)
    : value_(std::move(value)), domain_(std::move(domain)) {
  if (!domain_) throw ConstructionError("constant map needs a domain");
}

Json ConstantMap::to_json() const {
  return Json{{"kind", "constant"}, {"value", vec_to_json(value_)}};
}

ProjectionMap::ProjectionMap(BodyPtr target) : target_(std::move(target)) {
  if (!target_) throw ConstructionError("projection map needs a body");
}

BodyPtr ProjectionMap::domain() const {
  return std::make_shared<FullSpace>(target_->ambient_dim());
}

Json ProjectionMap::to_json() const {
  return Json{{"kind", "project"}, {"body", target_->to_json()}};
}

ComposedMap::ComposedMap(std::vector<MapPtr> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ConstructionError("compose needs at least one node");
  const int d = nodes_.front()->domain()->ambient_dim();
  for (const MapPtr& n : nodes_) {
    if (!n) throw ConstructionError("compose received a null node");
    if (n->domain()->ambient_dim() != d)
      throw ConstructionError("compose: node domains do not chain (dimension mismatch)");
  }
}

Vec ComposedMap::evaluate(const Vec& x) const {
  Vec y = x;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) y = (*it)->evaluate(y);
  return y;
}

Json ComposedMap::to_json() const {
  Json ns = Json::array();
  for (const MapPtr& n : nodes_) ns.push_back(n->to_json());
  return Json{{"kind", "compose"}, {"nodes", ns}};
}

SampledExtensionMap::SampledExtensionMap(SampledMap seed, BodyPtr domain)
    : map_(std::move(seed)), domain_(std::move(domain)) {
  if (!domain_) domain_ = std::make_shared<FullSpace>(map_.ambient_dim());
}

Vec SampledExtensionMap::evaluate(const Vec& x) const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.extend(x);
}

std::vector<Anchor> SampledExtensionMap::log_snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.log();
}

double SampledExtensionMap::worst_pair_ratio() const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.worst_pair_ratio();
}

Json SampledExtensionMap::to_json() const {
  Json anchors = Json::array();
  for (const Anchor& a : log_snapshot())
    anchors.push_back(Json{{"x", vec_to_json(a.x)}, {"y", vec_to_json(a.y)}});
  return Json{{"kind", "sampled_extension"}, {"anchors", anchors}};
}

OrthogonalShiftMap::OrthogonalShiftMap(MapPtr g, Vec y0, double c, BodyPtr body)
    : g_(std::move(g)), y0_(std::move(y0)), c_(c), body_(std::move(body)) {
  if (!g_ || !body_) throw ConstructionError("orthogonal shift needs a map and a body");
  if (std::abs(y0_.norm() - 1.0) > 1e-9)
    throw ConstructionError("orthogonal shift direction must be a unit vector");
  // Range orthogonality, validated on a seeded sample of the domain.
  Rng rng(0x05AFEULL);
  for (int i = 0; i < 64; ++i) {
    const Vec x = sample_in_body(*body_, rng, 4.0);
    const Vec gx = g_->evaluate(x);
    if (std::abs(gx.dot(y0_)) > 1e-9 * std::max(1.0, gx.norm()))
      throw ConstructionError("orthogonal shift: range of g is not orthogonal to y0");
  }
}

Vec OrthogonalShiftMap::pre_projection_argument(const Vec& x) const {
  return g_->evaluate(x) + x.dot(y0_) * y0_ + c_ * y0_;
}

Vec OrthogonalShiftMap::evaluate(const Vec& x) const {
  return body_->project(pre_projection_argument(x));
}

Json OrthogonalShiftMap::to_json() const {
  return Json{{"kind", "orthogonal_shift"},
              {"inner", g_->to_json()},
              {"y0", vec_to_json(y0_)},
              {"c", c_},
              {"body", body_->to_json()}};
}

// ---------------------------------------------------------------------------
// Factories

MapPtr identity_map(BodyPtr domain) {
  const int d = domain->ambient_dim();
  return std::make_shared<AffineMap>(std::nullopt, Vec::Zero(d), std::move(domain));
}

MapPtr translation_map(Vec shift, BodyPtr domain) {
  return std::make_shared<AffineMap>(std::nullopt, std::move(shift), std::move(domain));
}

MapPtr affine_map(Mat A, Vec b, BodyPtr domain) {
  return std::make_shared<AffineMap>(std::move(A), std::move(b), std::move(domain));
}

MapPtr constant_map(Vec value, BodyPtr domain) {
  return std::make_shared<ConstantMap>(std::move(value), std::move(domain));
}

MapPtr projection_map(BodyPtr target) {
  return std::make_shared<ProjectionMap>(std::move(target));
}

MapPtr compose(std::vector<MapPtr> nodes) {
  if (nodes.size() == 1) return nodes[0];
  return std::make_shared<ComposedMap>(std::move(nodes));
}

MapPtr iterate_map(MapPtr f, int k) {
  if (k < 1) throw ConstructionError("iterate_map needs k >= 1");
  if (k == 1) return f;
  std::vector<MapPtr> nodes(static_cast<size_t>(k), f);
  return std::make_shared<ComposedMap>(std::move(nodes));
}

MapPtr orthogonal_shift_map(MapPtr g, Vec y0, double c, BodyPtr body) {
  return std::make_shared<OrthogonalShiftMap>(std::move(g), std::move(y0), c, std::move(body));
}

MapPtr map_from_json(const Json& spec, BodyPtr default_domain, const std::string& where) {
  if (!spec.is_object()) throw ConfigError(where, "expected a map object");
  if (!spec.contains("kind") || !spec["kind"].is_string())
    throw ConfigError(where + "/kind", "missing map kind");
  const std::string kind = spec["kind"].get<std::string>();
  if (kind == "affine") {
    std::optional<Mat> A;
    if (spec.contains("matrix")) {
      const Json& rows = spec["matrix"];
      if (!rows.is_array() || rows.empty())
        throw ConfigError(where + "/matrix", "expected an array of rows");
      Mat m(static_cast<int>(rows.size()),
            static_cast<int>(rows[0].size()));
      for (size_t r = 0; r < rows.size(); ++r)
        m.row(static_cast<int>(r)) =
            vec_from_json(rows[r], where + "/matrix/" + std::to_string(r)).transpose();
      A = std::move(m);
    }
    const Vec b = vec_from_json(spec.at("offset"), where + "/offset");
    return std::make_shared<AffineMap>(std::move(A), b, default_domain);
  }
  if (kind == "constant")
    return constant_map(vec_from_json(spec.at("value"), where + "/value"), default_domain);
  if (kind == "project")
    return projection_map(body_from_json(spec.at("body"), where + "/body"));
  if (kind == "compose") {
    const Json& ns = spec.at("nodes");
    if (!ns.is_array() || ns.empty())
      throw ConfigError(where + "/nodes", "expected a non-empty array");
    std::vector<MapPtr> nodes;
    for (size_t i = 0; i < ns.size(); ++i)
      nodes.push_back(map_from_json(ns[i], default_domain,
                                    where + "/nodes/" + std::to_string(i)));
    return compose(std::move(nodes));
  }
  if (kind == "sampled_extension") {
    const Json& as = spec.at("anchors");
    if (!as.is_array() || as.empty())
      throw ConfigError(where + "/anchors", "expected a non-empty array");
    std::vector<Anchor> anchors;
    for (size_t i = 0; i < as.size(); ++i) {
      const std::string aw = where + "/anchors/" + std::to_string(i);
      anchors.push_back(Anchor{vec_from_json(as[i].at("x"), aw + "/x"),
                               vec_from_json(as[i].at("y"), aw + "/y")});
    }
    return std::make_shared<SampledExtensionMap>(SampledMap(anchors), default_domain);
  }
  if (kind == "orthogonal_shift") {
    BodyPtr body = body_from_json(spec.at("body"), where + "/body");
    return orthogonal_shift_map(
        map_from_json(spec.at("inner"), default_domain, where + "/inner"),
        vec_from_json(spec.at("y0"), where + "/y0"), spec.at("c").get<double>(), body);
  }
  throw ConfigError(where + "/kind", "unknown map kind '" + kind + "'");
}

LipschitzCertificate certify_lipschitz(const NonexpansiveMap& f, int pair_count,
                                       uint64_t rng_seed, double sample_radius) {
  Rng rng(rng_seed);
  const BodyPtr dom = f.domain();
  LipschitzCertificate cert;
  for (int i = 0; i < pair_count; ++i) {
    const Vec x = sample_in_body(*dom, rng, sample_radius);
    const Vec y = sample_in_body(*dom, rng, sample_radius);
    const double dx = (x - y).norm();
    if (dx < 1e-8) continue;
    const double dy = (f.evaluate(x) - f.evaluate(y)).norm();
    cert.worst_ratio = std::max(cert.worst_ratio, dy / dx);
    ++cert.pairs_used;
  }
  cert.pass = cert.worst_ratio <= 1.0 + 1e-7;
  return cert;
}

}  // namespace fplab
