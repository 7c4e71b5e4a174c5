#include <doctest.h>

#include "fplab/geometry.hpp"
#include "fplab/sampling.hpp"

using namespace fplab;

namespace {

Subspace axis_subspace(int d, int i) {
  Mat b = Mat::Zero(d, 1);
  b(i, 0) = 1.0;
  return Subspace(b);
}

// Normal-equations oracle: least-squares solve of B c = x, then B c.
Vec least_squares_projection(const Mat& B, const Vec& x) {
  const Vec c = (B.transpose() * B).ldlt().solve(B.transpose() * x);
  return B * c;
}

}  // namespace

TEST_CASE("coordinate projection") {
  const Subspace F = axis_subspace(3, 0);
  Vec x(3);
  x << 1, 2, 3;
  CHECK((F.project(x) - Vec(Vec::Unit(3, 0))).norm() == doctest::Approx(0.0).epsilon(1e-15));
  Vec expected_reject(3);
  expected_reject << 0, 2, 3;
  CHECK((F.reject(x) - expected_reject).norm() < 1e-15);
}

TEST_CASE("projection fixes subspace members and rejects them to zero") {
  Mat b(3, 1);
  b << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  const Subspace F{b};
  const Vec x = 3.7 * b.col(0);
  CHECK((F.project(x) - x).norm() < 1e-12);
  CHECK(F.reject(x).norm() < 1e-12);
}

TEST_CASE("projection agrees with the normal-equations oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Subspace F = orthonormalize({gaussian_vec(rng, 4), gaussian_vec(rng, 4)}, 4);
    REQUIRE(F.dim() == 2);
    const Vec x = gaussian_vec(rng, 4);
    CHECK((F.project(x) - least_squares_projection(F.basis(), x)).norm() <= 1e-12);
  }
}

TEST_CASE("projection is idempotent and contractive") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Subspace F =
        orthonormalize({gaussian_vec(rng, 5), gaussian_vec(rng, 5), gaussian_vec(rng, 5)}, 5);
    const Vec x = 3.0 * gaussian_vec(rng, 5);
    const Vec px = F.project(x);
    CHECK((F.project(px) - px).norm() <= 1e-12);
    CHECK(px.norm() <= x.norm() + 1e-12);
  }
}

TEST_CASE("pythagoras across the splitting") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Subspace F = orthonormalize({gaussian_vec(rng, 6), gaussian_vec(rng, 6)}, 6);
    const Vec x = gaussian_vec(rng, 6);
    const double lhs = F.project(x).squaredNorm() + F.reject(x).squaredNorm();
    CHECK(std::abs(lhs - x.squaredNorm()) <= 1e-12 * (1.0 + x.squaredNorm()));
  }
}

TEST_CASE("complement is orthogonal to every basis vector") {
  Rng rng(17);
  const Subspace F = orthonormalize({gaussian_vec(rng, 5), gaussian_vec(rng, 5)}, 5);
  const Vec x = gaussian_vec(rng, 5);
  const Vec rej = F.reject(x);
  for (int j = 0; j < F.dim(); ++j)
    CHECK(std::abs(rej.dot(F.basis().col(j))) <= 1e-12);
  const Subspace C = F.complement();
  CHECK(C.dim() == 3);
  CHECK((F.basis().transpose() * C.basis()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("orthonormalize drops dependent vectors") {
  const Vec e1 = Vec::Unit(3, 0);
  const Subspace F = orthonormalize({e1, 2.0 * e1}, 3);
  CHECK(F.dim() == 1);
  CHECK((F.basis().col(0) - e1).norm() < 1e-14);
}

TEST_CASE("orthonormalize keeps an orthonormal pair as-is") {
  const Subspace F = orthonormalize({Vec(Vec::Unit(3, 0)), Vec(Vec::Unit(3, 1))}, 3);
  CHECK(F.dim() == 2);
  CHECK((F.basis() - Mat(Mat::Identity(3, 3)).leftCols(2)).norm() < 1e-14);
}

TEST_CASE("orthonormalize output has identity gram matrix") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Subspace F = orthonormalize(
        {gaussian_vec(rng, 5), gaussian_vec(rng, 5), gaussian_vec(rng, 5)}, 5);
    const Mat gram = F.basis().transpose() * F.basis();
    CHECK((gram - Mat(Mat::Identity(F.dim(), F.dim()))).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("orthonormalize spans the input: reconstruction within 1e-9") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> input = {gaussian_vec(rng, 5), gaussian_vec(rng, 5), gaussian_vec(rng, 5)};
    const Subspace F = orthonormalize(input, 5);
    for (const Vec& v : input) CHECK(F.reject(v).norm() <= 1e-9 * (1.0 + v.norm()));
  }
}

TEST_CASE("empty input yields the zero-dimensional subspace") {
  const Subspace F = orthonormalize({}, 4);
  CHECK(F.dim() == 0);
  const Vec x = Vec::Constant(4, 2.0);
  CHECK(F.project(x).norm() == 0.0);
  CHECK((F.reject(x) - x).norm() == 0.0);
  CHECK(F.complement().dim() == 4);
}

TEST_CASE("non-orthonormal basis is rejected") {
  Mat b(3, 2);
  b << 1, 1, 0, 1, 0, 0;
  CHECK_THROWS_AS(Subspace{b}, CertificateViolation);
}
