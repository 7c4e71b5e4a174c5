#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fplab/geometry.hpp"
#include "fplab/json_util.hpp"
#include "fplab/sampling.hpp"

namespace fplab {

inline constexpr double kRayHorizon = 1e6;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A closed convex set given through membership, nearest-point projection,
/// boundary distance, ray extent and unbounded-direction oracles. Bodies
/// are immutable; every operation is pure.
class ConvexBody {
 public:
  virtual ~ConvexBody() = default;

  virtual int ambient_dim() const = 0;
  virtual bool contains(const Vec& x, double tol = 1e-9) const = 0;

  /// Nearest point of the body; returns x itself when contains(x).
  virtual Vec project(const Vec& x) const = 0;

  /// Radius of the largest ball centered at x inside the body (+inf for
  /// the full space). Throws DomainError when x is outside.
  virtual double boundary_distance(const Vec& x) const;

  /// sup { t >= 0 : x + t u in body } for unit u and x in the body.
  /// Exponential search plus bisection to 1e-9; +inf past kRayHorizon.
  virtual double ray_max(const Vec& x, const Vec& u) const;

  /// A unit vector orthogonal to F along which the body is unbounded,
  /// when one exists. Finite truncation stand-in for recession reasoning.
  virtual std::optional<Vec> unbounded_direction(const Subspace& F) const;

  virtual bool is_bounded() const = 0;
  virtual Vec interior_point() const = 0;

  virtual std::string kind() const = 0;
  virtual Json to_json() const = 0;

 protected:
  void require_inside(const Vec& x, double tol = 1e-7) const;
  void require_unit(const Vec& u) const;
};

using BodyPtr = std::shared_ptr<const ConvexBody>;

class Ball final : public ConvexBody {
 public:
  Ball(Vec center, double radius);
  int ambient_dim() const override { return static_cast<int>(center_.size()); }
  bool contains(const Vec& x, double tol) const override;
  Vec project(const Vec& x) const override;
  double boundary_distance(const Vec& x) const override;
  double ray_max(const Vec& x, const Vec& u) const override;
  std::optional<Vec> unbounded_direction(const Subspace&) const override { return std::nullopt; }
  bool is_bounded() const override { return true; }
  Vec interior_point() const override { return center_; }
  std::string kind() const override { return "ball"; }
  Json to_json() const override;
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Vec center_;
  double radius_;
};

/// { x : dist(x, F) <= r } for a subspace F; unbounded along F.
class Tube final : public ConvexBody {
 public:
  Tube(Subspace axis, double radius);
  int ambient_dim() const override { return axis_.ambient_dim(); }
  bool contains(const Vec& x, double tol) const override;
  Vec project(const Vec& x) const override;
  double boundary_distance(const Vec& x) const override;
  double ray_max(const Vec& x, const Vec& u) const override;
  std::optional<Vec> unbounded_direction(const Subspace& F) const override;
  bool is_bounded() const override { return axis_.dim() == 0; }
  Vec interior_point() const override { return Vec::Zero(ambient_dim()); }
  std::string kind() const override { return "tube"; }
  Json to_json() const override;
  const Subspace& axis() const { return axis_; }
  double radius() const { return radius_; }

 private:
  Subspace axis_;
  double radius_;
};

/// D_F(alpha, beta) = { x : ||pi_{F^perp}(x)|| - beta <= beta/alpha ||pi_F(x)|| }.
/// Container set with bounded F^perp slices; it is not convex, so the
/// projection picks the nearest point of the 2-d radial reduction and the
/// nonexpansiveness invariants are not claimed for it.
class BluntCone final : public ConvexBody {
 public:
  BluntCone(Subspace F, double alpha, double beta);
  int ambient_dim() const override { return F_.ambient_dim(); }
  bool contains(const Vec& x, double tol) const override;
  Vec project(const Vec& x) const override;
  std::optional<Vec> unbounded_direction(const Subspace& F) const override;
  bool is_bounded() const override { return false; }
  Vec interior_point() const override { return Vec::Zero(ambient_dim()); }
  std::string kind() const override { return "blunt_cone"; }
  Json to_json() const override;

 private:
  Subspace F_;
  double alpha_, beta_;
};

struct Halfspace {
  Vec normal;     // unit
  double offset;  // <normal, x> <= offset
};

class HalfspaceIntersection final : public ConvexBody {
 public:
  HalfspaceIntersection(std::vector<Halfspace> faces,
                        std::optional<Vec> interior = std::nullopt,
                        bool bounded = false);
  int ambient_dim() const override { return static_cast<int>(faces_.at(0).normal.size()); }
  bool contains(const Vec& x, double tol) const override;
  /// Dykstra cycles over the halfspaces; ConvergenceError past max sweeps.
  Vec project(const Vec& x) const override;
  double boundary_distance(const Vec& x) const override;
  double ray_max(const Vec& x, const Vec& u) const override;
  bool is_bounded() const override { return bounded_; }
  Vec interior_point() const override;
  std::string kind() const override { return "halfspaces"; }
  Json to_json() const override;

 private:
  std::vector<Halfspace> faces_;
  std::optional<Vec> interior_;
  bool bounded_;
};

/// { x : x_1 >= sum_{i >= 2} x_i^2 }; strictly convex unbounded body.
class SolidParaboloid final : public ConvexBody {
 public:
  explicit SolidParaboloid(int dim);
  int ambient_dim() const override { return dim_; }
  bool contains(const Vec& x, double tol) const override;
  Vec project(const Vec& x) const override;
  double boundary_distance(const Vec& x) const override;
  double ray_max(const Vec& x, const Vec& u) const override;
  std::optional<Vec> unbounded_direction(const Subspace& F) const override;
  bool is_bounded() const override { return false; }
  Vec interior_point() const override;
  std::string kind() const override { return "paraboloid"; }
  Json to_json() const override;

 private:
  int dim_;
};

class TranslatedBody final : public ConvexBody {
 public:
  TranslatedBody(BodyPtr base, Vec shift);
  int ambient_dim() const override { return base_->ambient_dim(); }
  bool contains(const Vec& x, double tol) const override { return base_->contains(x - shift_, tol); }
  Vec project(const Vec& x) const override { return base_->project(x - shift_) + shift_; }
  double boundary_distance(const Vec& x) const override { return base_->boundary_distance(x - shift_); }
  double ray_max(const Vec& x, const Vec& u) const override { return base_->ray_max(x - shift_, u); }
  std::optional<Vec> unbounded_direction(const Subspace& F) const override {
    return base_->unbounded_direction(F);
  }
  bool is_bounded() const override { return base_->is_bounded(); }
  Vec interior_point() const override { return base_->interior_point() + shift_; }
  std::string kind() const override { return "translate"; }
  Json to_json() const override;
  const BodyPtr& base() const { return base_; }
  const Vec& shift() const { return shift_; }

 private:
  BodyPtr base_;
  Vec shift_;
};

class FullSpace final : public ConvexBody {
 public:
  explicit FullSpace(int dim) : dim_(dim) {}
  int ambient_dim() const override { return dim_; }
  bool contains(const Vec& x, double) const override { return is_finite(x) && x.size() == dim_; }
  Vec project(const Vec& x) const override { return x; }
  double boundary_distance(const Vec&) const override { return kInf; }
  double ray_max(const Vec&, const Vec&) const override { return kInf; }
  std::optional<Vec> unbounded_direction(const Subspace& F) const override;
  bool is_bounded() const override { return false; }
  Vec interior_point() const override { return Vec::Zero(dim_); }
  std::string kind() const override { return "full_space"; }
  Json to_json() const override;

 private:
  int dim_;
};

/// Convex hull of finitely many points; projection is a small simplex QP.
class PolytopeHull final : public ConvexBody {
 public:
  explicit PolytopeHull(std::vector<Vec> vertices);
  int ambient_dim() const override { return static_cast<int>(verts_.rows()); }
  bool contains(const Vec& x, double tol) const override;
  Vec project(const Vec& x) const override;
  bool is_bounded() const override { return true; }
  Vec interior_point() const override { return verts_.rowwise().mean(); }
  std::string kind() const override { return "hull"; }
  Json to_json() const override;
  const Mat& vertices() const { return verts_; }

 private:
  Mat verts_;  // ambient x count
};

BodyPtr body_from_json(const Json& spec, const std::string& where = "/body");

/// Project-a-ball-sample scheme: always lands inside the body.
Vec sample_in_body(const ConvexBody& body, Rng& rng, double radius);

/// Uniform draw from body ∩ B(center, radius). Direct samplers for the
/// tube, ball and full space; rejection from the ball otherwise.
Vec sample_in_ball_intersection(const ConvexBody& body, Rng& rng,
                                const Vec& center, double radius,
                                long max_tries = 2000000);

}  // namespace fplab
