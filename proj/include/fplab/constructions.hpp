#pragma once

#include <string>
#include <vector>

#include "fplab/dynamics.hpp"
#include "fplab/metric.hpp"
#include "fplab/somewhat_bounded.hpp"

namespace fplab {

struct PostCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

/// Output of a perturbation construction: the perturbed map, the metric
/// distance to the input map (tail bound included), the parameter trail,
/// and a postcondition checklist with measured slacks.
struct PerturbationReport {
  MapPtr perturbed;
  MetricValue metric_distance;
  Json parameters;
  std::vector<PostCheck> checks;
  bool all_pass() const;
  Json to_json() const;
};

struct FixedPointOptions {
  int invariance_samples = 1000;
  long km_max_iter = 100000;
  double km_tol = 1e-8;
  int metric_terms = 40;  // floor; raised to n when n is larger
  uint64_t rng_seed = 1;
};

/// Perturbs f into a nearby g (d_Theta < eps) that maps the bounded slab
/// r'B ∩ C into itself and owns a fixed point reachable by the averaged
/// iteration. Anchors keep f on theta_1..theta_n and send a finite net of
/// far sphere points to 0; the map is the projected Kirszbraun extension
/// of those anchors. Bounded bodies short-circuit: the averaged iteration
/// already finds a fixed point of f itself.
PerturbationReport build_fixed_point_perturbation(const MapPtr& f, double eps,
                                                  const SBCertificate& cert,
                                                  const ThetaSequence& theta,
                                                  const FixedPointOptions& opt = {});

struct BoundaryDriftOptions {
  double boundary_tol = 1e-3;
  int metric_terms = 40;
  uint64_t rng_seed = 1;
};

/// Perturbs f into h = pi_C(g + Q + (delta/2) y0) with g = pi_D f pi_D,
/// D the anchor hull and y0 orthogonal to everything in play. Orbits of
/// theta_p climb along y0 until they approach the boundary; the report
/// tracks the interior-phase drift identity and the first step where the
/// projection activates.
PerturbationReport build_boundary_drift(const MapPtr& f, double delta, int p,
                                        const ThetaSequence& theta, const BodyPtr& body,
                                        const SBCertificate& cert,
                                        const BoundaryDriftOptions& opt = {});

struct DriftOptions {
  int metric_terms = 40;
  uint64_t rng_seed = 1;
};

/// Perturbs f into h = pi_C(g + Q + (3r/k) y0) whose k-th iterate moves 0
/// by at least 3r, yielding an exclusion certificate for B(0, r).
PerturbationReport build_drift_perturbation(const MapPtr& f, double eps, double r,
                                            const ThetaSequence& theta,
                                            const BodyPtr& body,
                                            const DriftOptions& opt = {});

}  // namespace fplab
