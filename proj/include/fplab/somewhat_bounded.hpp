#pragma once

#include <optional>

#include "fplab/bodies.hpp"

namespace fplab {

/// Witness (x0, F, alpha, beta) of somewhat boundedness:
/// alpha B_F ⊂ C - x0 ⊂ D_F(alpha, beta).
struct SBCertificate {
  Vec x0;
  Subspace F;
  double alpha = 0.0;
  double beta = 0.0;
};

SBCertificate certificate_from_json(const Json& j, const std::string& where);
Json certificate_to_json(const SBCertificate& cert);

/// ||pi_{F^perp}(x)|| - beta <= beta/alpha ||pi_F(x)||, with 1e-12 slack.
bool in_blunt_cone(const Vec& x, const Subspace& F, double alpha, double beta);

struct Verdict {
  bool pass = false;
  double worst_slack = 0.0;  // positive means violated
  std::optional<Vec> counterexample;
  int samples = 0;
};

/// Samples both inclusions of the certificate: the alpha-sphere of F for
/// membership in C - x0, and body samples for membership in D_F.
/// Deterministic directional probes along F^perp run first, so totally
/// unbounded bodies fail reproducibly.
Verdict verify_certificate(const ConvexBody& body, const SBCertificate& cert,
                           int sample_count, uint64_t rng_seed);

struct CoveringParameters {
  double lambda = 0.0;
  double t = 0.0;
  double r = 0.0;
  double r_prime = 0.0;
};

/// t at equality in  t - beta/sqrt(a^2+b^2) (alpha + t) >= lambda,
/// r = sqrt((2t)^2 + (beta + beta t / alpha)^2),  r' = sqrt(r^2 + t^2).
CoveringParameters covering_parameters(double alpha, double beta, double lambda);

struct CoveringReport {
  bool pass = false;
  CoveringParameters params;
  int samples = 0;
  /// max over samples of ||x - witness|| - r  (<= tolerance when passing)
  double worst_distance_slack = -kInf;
  /// min over witnesses of ||pi_C(w)|| - lambda (>= -tolerance when passing)
  double worst_membership_slack = kInf;
  /// slack of the chain bound ||x-y||^2 <= r^2 + 2t^2 - 2t||pi_F x||
  double worst_chain_slack = -kInf;
  std::optional<Vec> counterexample;
};

/// Monte-Carlo check of  r'B ∩ C ⊆ E_F(lambda, t) + rB  using the
/// explicit witnesses: the radial point t pi_F(x)/||pi_F(x)|| when
/// ||pi_F(x)|| > t, else a fixed v built from a far point of the body.
CoveringReport check_covering(const ConvexBody& body, const SBCertificate& cert,
                              double lambda, int sample_count, uint64_t rng_seed);

}  // namespace fplab
