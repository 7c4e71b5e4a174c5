#include "fplab/simplex_qp.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace fplab {
namespace {

// Restricted step over the affine hull of the support. Solves the bordered
// KKT system; when the system is inconsistent (the quadratic is unbounded
// below on the affine hull, which happens for affinely dependent supports)
// returns a descent ray target instead, so the caller's line search drops
// a coordinate.
Vec affine_target(const Mat& W, const Vec& dS, const Vec& mu) {
  const int m = static_cast<int>(W.cols());
  if (m == 1) return Vec::Ones(1);
  Mat kkt = Mat::Zero(m + 1, m + 1);
  kkt.topLeftCorner(m, m) = 2.0 * (W.transpose() * W);
  kkt.topRightCorner(m, 1).setOnes();
  kkt.bottomLeftCorner(1, m).setOnes();
  Vec rhs(m + 1);
  rhs.head(m) = dS;
  rhs[m] = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(kkt);
  const Vec sol = cod.solve(rhs);
  const double scale =
      std::max({1.0, rhs.cwiseAbs().maxCoeff(), kkt.cwiseAbs().maxCoeff()});
  if (sol.allFinite() && (kkt * sol - rhs).cwiseAbs().maxCoeff() <= 1e-6 * scale)
    return sol.head(m);

  // Inconsistent: find z with W z = 0, sum z = 0 and dS.z >= 0, and aim far
  // along it. Some coordinate of z is negative, so the line search clamps.
  Mat A(W.rows() + 1, m);
  A.topRows(W.rows()) = W;
  A.bottomRows(1).setOnes();
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  Vec z = svd.matrixV().col(m - 1);
  if (dS.dot(z) < 0.0) z = -z;
  double step = 0.0;
  for (int i = 0; i < m; ++i)
    if (z[i] < -1e-14) step = std::max(step, mu[i] / -z[i]);
  if (step == 0.0) step = 1.0;
  return mu + 2.0 * step * z;
}

}  // namespace

Eigen::VectorXd simplex_qp(Eigen::Ref<const Mat> P, Eigen::Ref<const Vec> d,
                           double gap_tol) {
  const int n = static_cast<int>(P.cols());
  if (n == 0) throw DomainError("simplex_qp: no points");
  if (n == 1) return Vec::Ones(1);

  // Recenter the points; the optimizer is invariant and the numbers shrink.
  const Vec center = P.rowwise().mean();
  Mat W = P.colwise() - center;
  Vec dt = d - 2.0 * (W.transpose() * center);

  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    scale = std::max({scale, std::abs(dt[i]), W.col(i).squaredNorm()});

  // Best single vertex.
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double v = W.col(i).squaredNorm() - dt[i];
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }

  std::vector<int> support{best};
  Vec mu_s = Vec::Ones(1);

  const int max_outer = 3 * (n + static_cast<int>(P.rows())) + 64;
  for (int outer = 0; outer < max_outer; ++outer) {
    // Inner loop: restore optimality over conv(support).
    const int inner_cap = 2 * static_cast<int>(support.size()) + 4;
    for (int inner = 0; inner < inner_cap; ++inner) {
      const int m = static_cast<int>(support.size());
      Mat Ws(W.rows(), m);
      Vec ds(m);
      for (int j = 0; j < m; ++j) {
        Ws.col(j) = W.col(support[static_cast<size_t>(j)]);
        ds[j] = dt[support[static_cast<size_t>(j)]];
      }
      const Vec nu = affine_target(Ws, ds, mu_s);
      if (nu.minCoeff() >= -1e-12) {
        mu_s = nu.cwiseMax(0.0);
        mu_s /= mu_s.sum();
        break;
      }
      // Step toward nu until the first coordinate hits zero, then drop it.
      double theta = 1.0;
      int drop = -1;
      for (int j = 0; j < m; ++j) {
        if (nu[j] < 0.0) {
          const double tj = mu_s[j] / (mu_s[j] - nu[j]);
          if (tj < theta) {
            theta = tj;
            drop = j;
          }
        }
      }
      mu_s = mu_s + theta * (nu - mu_s);
      if (drop < 0) {
        mu_s = mu_s.cwiseMax(0.0);
        mu_s /= mu_s.sum();
        break;
      }
      support.erase(support.begin() + drop);
      Vec shrunk(mu_s.size() - 1);
      int k = 0;
      for (int j = 0; j < mu_s.size(); ++j)
        if (j != drop) shrunk[k++] = std::max(mu_s[j], 0.0);
      mu_s = shrunk;
      if (mu_s.sum() <= 0.0) {
        mu_s.setConstant(1.0 / mu_s.size());
      } else {
        mu_s /= mu_s.sum();
      }
    }

    // Frank-Wolfe gap over all vertices.
    Vec y = Vec::Zero(W.rows());
    for (size_t j = 0; j < support.size(); ++j)
      y += mu_s[static_cast<int>(j)] * W.col(support[j]);
    Vec grad = 2.0 * (W.transpose() * y) - dt;
    int jmin = 0;
    grad.minCoeff(&jmin);
    double mu_grad = 0.0;
    for (size_t j = 0; j < support.size(); ++j)
      mu_grad += mu_s[static_cast<int>(j)] * grad[support[j]];
    const double gap = mu_grad - grad[jmin];
    if (gap <= gap_tol * scale) break;
    if (std::find(support.begin(), support.end(), jmin) != support.end()) break;
    support.push_back(jmin);
    Vec grown(mu_s.size() + 1);
    grown.head(mu_s.size()) = mu_s;
    grown[mu_s.size()] = 0.0;
    mu_s = grown;
  }

  Vec mu = Vec::Zero(n);
  for (size_t j = 0; j < support.size(); ++j)
    mu[support[j]] = mu_s[static_cast<int>(j)];
  return mu;
}

Vec project_onto_hull(Eigen::Ref<const Mat> V, const Vec& x) {
  const Vec d = 2.0 * (V.transpose() * x);
  const Vec mu = simplex_qp(V, d);
  return V * mu;
}

}  // namespace fplab
