#include "fplab/geometry.hpp"

#include <cmath>

namespace fplab {

bool is_finite(const Vec& x) { return x.allFinite(); }

Subspace Subspace::zero(int ambient_dim) {
  Subspace s;
  s.basis_ = Mat::Zero(ambient_dim, 0);
  return s;
}

Subspace::Subspace(Mat basis) : basis_(std::move(basis)) {
  const auto k = basis_.cols();
  if (k == 0) return;
  if (!basis_.allFinite()) throw CertificateViolation("subspace basis has non-finite entries");
  Mat gram = basis_.transpose() * basis_;
  gram -= Mat::Identity(k, k);
  if (gram.cwiseAbs().maxCoeff() > 1e-12)
    throw CertificateViolation("subspace basis is not orthonormal within 1e-12");
}

Vec Subspace::project(const Vec& x) const {
  if (dim() == 0) return Vec::Zero(x.size());
  return basis_ * (basis_.transpose() * x);
}

Vec Subspace::reject(const Vec& x) const { return x - project(x); }

bool Subspace::contains(const Vec& x, double tol) const {
  return reject(x).norm() <= tol;
}

Subspace Subspace::complement() const {
  const int d = ambient_dim();
  std::vector<Vec> cols;
  cols.reserve(d);
  for (int j = 0; j < dim(); ++j) cols.push_back(basis_.col(j));
  const int head = static_cast<int>(cols.size());
  for (int i = 0; i < d; ++i) {
    Vec w = Vec::Unit(d, i);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : cols) w -= b.dot(w) * b;
    const double nw = w.norm();
    if (nw > 1e-10) cols.push_back(w / nw);
  }
  Mat comp(d, static_cast<int>(cols.size()) - head);
  for (int j = head; j < static_cast<int>(cols.size()); ++j)
    comp.col(j - head) = cols[static_cast<size_t>(j)];
  return Subspace(std::move(comp));
}

Subspace orthonormalize(const std::vector<Vec>& vectors, int ambient_dim,
                        double drop_tol) {
  std::vector<Vec> basis;
  for (const Vec& v : vectors) {
    if (v.size() != ambient_dim)
      throw DomainError("orthonormalize: vector length does not match ambient dimension");
    if (!is_finite(v)) throw DomainError("orthonormalize: non-finite vector");
    Vec w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) w -= b.dot(w) * b;
    const double nw = w.norm();
    if (nw >= drop_tol) basis.push_back(w / nw);
  }
  if (basis.empty()) return Subspace::zero(ambient_dim);
  Mat m(ambient_dim, static_cast<int>(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j) m.col(static_cast<int>(j)) = basis[j];
  return Subspace(std::move(m));
}

Subspace span_of(const std::vector<Vec>& vectors, int ambient_dim) {
  return orthonormalize(vectors, ambient_dim);
}

}  // namespace fplab
