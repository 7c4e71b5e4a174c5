#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fplab/bodies.hpp"
#include "fplab/geometry.hpp"

namespace fplab {

/// An evaluable self-map with certified Lipschitz bound <= 1, represented
/// as a composition tree. Pure nodes are freely concurrent; the sampled
/// extension node serializes appends to its anchor log internally.
class NonexpansiveMap {
 public:
  virtual ~NonexpansiveMap() = default;
  virtual Vec evaluate(const Vec& x) const = 0;
  virtual BodyPtr domain() const = 0;
  virtual std::string kind() const = 0;
  virtual Json to_json() const = 0;
};

using MapPtr = std::shared_ptr<const NonexpansiveMap>;

struct Anchor {
  Vec x;
  Vec y;
};

/// Anchor log of a 1-Lipschitz sample; the append order is part of the
/// map's identity and is serialized. extend() computes a point of the
/// ball intersection  ∩_i B(y_i, ||q - x_i||)  (nonempty for 1-Lipschitz
/// data) and appends the new pair so later queries stay consistent.
class SampledMap {
 public:
  SampledMap() = default;
  explicit SampledMap(const std::vector<Anchor>& seed, double pair_tol = 1e-9);

  int size() const { return count_; }
  int ambient_dim() const { return static_cast<int>(X_.rows()); }
  std::vector<Anchor> log() const;

  /// Extends the sample at `query`. Queries within 1e-10 of a stored
  /// anchor return the stored value without appending. Otherwise throws
  /// InfeasibleExtension when no point clears feasibility 1e-8.
  Vec extend(const Vec& query);

  /// Max-slack objective max_i(||y - y_i|| - ||q - x_i||) at a point.
  double objective(const Vec& query, const Vec& y) const;

  /// Largest pairwise ratio ||y_i-y_j|| / ||x_i-x_j|| over the log.
  double worst_pair_ratio() const;

 private:
  void append(const Vec& x, const Vec& y, double pair_tol);
  Mat X_{0, 0}, Y_{0, 0};  // ambient x capacity, first count_ columns live
  std::vector<double> y_norm2_;
  int count_ = 0;
  double pair_tol_ = 1e-9;
};

/// x -> A x + b with spectral norm of A at most 1; A omitted means identity.
class AffineMap final : public NonexpansiveMap {
 public:
  AffineMap(std::optional<Mat> A, Vec b, BodyPtr domain);
  Vec evaluate(const Vec& x) const override;
  BodyPtr domain() const override { return domain_; }
  std::string kind() const override { return "affine"; }
  Json to_json() const override;

 private:
  std::optional<Mat> A_;
  Vec b_;
  BodyPtr domain_;
};

class ConstantMap final : public NonexpansiveMap {
 public:
  ConstantMap(Vec value, BodyPtr domain);
  Vec evaluate(const Vec&) const override { return value_; }
  BodyPtr domain() const override { return domain_; }
  std::string kind() const override { return "constant"; }
  Json to_json() const override;

 private:
  Vec value_;
  BodyPtr domain_;
};

/// Nearest-point projection onto a body, as a map of the ambient space.
class ProjectionMap final : public NonexpansiveMap {
 public:
  explicit ProjectionMap(BodyPtr target);
  Vec evaluate(const Vec& x) const override { return target_->project(x); }
  BodyPtr domain() const override;
  std::string kind() const override { return "project"; }
  Json to_json() const override;
  const BodyPtr& target() const { return target_; }

 private:
  BodyPtr target_;
};

/// compose(a, b, c) applies c first: x -> a(b(c(x))).
class ComposedMap final : public NonexpansiveMap {
 public:
  explicit ComposedMap(std::vector<MapPtr> nodes);
  Vec evaluate(const Vec& x) const override;
  BodyPtr domain() const override { return nodes_.back()->domain(); }
  std::string kind() const override { return "compose"; }
  Json to_json() const override;

 private:
  std::vector<MapPtr> nodes_;  // math order, rightmost applied first
};

/// Kirszbraun-extension node over a shared anchor log. Evaluation appends;
/// appends are serialized and appear atomic.
class SampledExtensionMap final : public NonexpansiveMap {
 public:
  SampledExtensionMap(SampledMap seed, BodyPtr domain);
  Vec evaluate(const Vec& x) const override;
  BodyPtr domain() const override { return domain_; }
  std::string kind() const override { return "sampled_extension"; }
  Json to_json() const override;
  std::vector<Anchor> log_snapshot() const;
  double worst_pair_ratio() const;

 private:
  mutable SampledMap map_;
  mutable std::mutex mu_;
  BodyPtr domain_;
};

/// h(x) = pi_C( g(x) + Q(x) + c y0 ) with Q the orthogonal projection onto
/// span{y0}. Requires range(g) orthogonal to y0 (validated by sampling);
/// then ||h(x)-h(y)||^2 <= ||g(x)-g(y)||^2 + ||Q(x)-Q(y)||^2 <= ||x-y||^2.
class OrthogonalShiftMap final : public NonexpansiveMap {
 public:
  OrthogonalShiftMap(MapPtr g, Vec y0, double c, BodyPtr body);
  Vec evaluate(const Vec& x) const override;
  /// The argument handed to pi_C; used to detect projection activation.
  Vec pre_projection_argument(const Vec& x) const;
  BodyPtr domain() const override { return body_; }
  std::string kind() const override { return "orthogonal_shift"; }
  Json to_json() const override;

 private:
  MapPtr g_;
  Vec y0_;
  double c_;
  BodyPtr body_;
};

/// Named form of the extension operation; appends the query pair.
inline Vec kirszbraun_extend(SampledMap& map, const Vec& query) {
  return map.extend(query);
}

MapPtr identity_map(BodyPtr domain);
MapPtr translation_map(Vec shift, BodyPtr domain);
MapPtr affine_map(Mat A, Vec b, BodyPtr domain);
MapPtr constant_map(Vec value, BodyPtr domain);
MapPtr projection_map(BodyPtr target);
MapPtr compose(std::vector<MapPtr> nodes);
MapPtr iterate_map(MapPtr f, int k);
MapPtr orthogonal_shift_map(MapPtr g, Vec y0, double c, BodyPtr body);

MapPtr map_from_json(const Json& spec, BodyPtr default_domain,
                     const std::string& where = "/map");

struct LipschitzCertificate {
  double worst_ratio = 0.0;
  bool pass = false;
  int pairs_used = 0;
};

/// Worst sampled ratio ||f(x)-f(y)|| / ||x-y||; pairs closer than 1e-8
/// are skipped. PASS iff the ratio stays within 1 + 1e-7.
LipschitzCertificate certify_lipschitz(const NonexpansiveMap& f, int pair_count,
                                       uint64_t rng_seed, double sample_radius = 4.0);

}  // namespace fplab
