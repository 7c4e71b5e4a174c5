#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fplab/errors.hpp"

namespace fplab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

bool is_finite(const Vec& x);

/// A finite-dimensional subspace of the ambient space, held as an
/// orthonormal basis (columns). Pairwise inner products must match
/// delta_ij within 1e-12 or construction throws CertificateViolation.
class Subspace {
 public:
  /// Zero-dimensional subspace of the given ambient space.
  static Subspace zero(int ambient_dim);

  /// basis: ambient_dim x dim matrix with orthonormal columns.
  explicit Subspace(Mat basis);

  int dim() const { return static_cast<int>(basis_.cols()); }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  const Mat& basis() const { return basis_; }

  /// Orthogonal projection onto the subspace.
  Vec project(const Vec& x) const;
  /// Orthogonal projection onto the complement: x - project(x).
  Vec reject(const Vec& x) const;
  /// Orthonormal basis of the orthogonal complement.
  Subspace complement() const;
  /// Whether x lies in the subspace up to tol.
  bool contains(const Vec& x, double tol = 1e-9) const;

 private:
  Subspace() = default;
  Mat basis_;  // ambient x dim, orthonormal columns
};

/// Modified Gram-Schmidt with a re-orthogonalization pass. Vectors whose
/// residual norm after deflation falls below drop_tol are dropped.
/// An empty input yields the zero-dimensional subspace.
Subspace orthonormalize(const std::vector<Vec>& vectors, int ambient_dim,
                        double drop_tol = 1e-10);

/// Subspace spanned by the given vectors (all required nonzero after MGS).
Subspace span_of(const std::vector<Vec>& vectors, int ambient_dim);

}  // namespace fplab
