#pragma once

#include "fplab/geometry.hpp"

namespace fplab {

/// Minimizes q(mu) = ||P mu||^2 - d.mu over the probability simplex.
/// P holds one point per column. Active-set scheme in the style of
/// Wolfe's minimum-norm-point algorithm; terminates on a Frank-Wolfe
/// gap below gap_tol * problem scale.
Eigen::VectorXd simplex_qp(Eigen::Ref<const Mat> P, Eigen::Ref<const Vec> d,
                           double gap_tol = 1e-13);

/// Nearest point of conv(columns of V) to x.
Vec project_onto_hull(Eigen::Ref<const Mat> V, const Vec& x);

}  // namespace fplab
