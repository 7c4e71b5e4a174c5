#include <doctest.h>

#include <cmath>

#include "fplab/metric.hpp"

using namespace fplab;

namespace {

BodyPtr full(int d) { return std::make_shared<FullSpace>(d); }

MapPtr random_affine(Rng& rng, const BodyPtr& dom) {
  const int d = dom->ambient_dim();
  Mat G(d, d);
  std::normal_distribution<double> n01;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) G(r, c) = n01(rng);
  Mat Q = Eigen::HouseholderQR<Mat>(G).householderQ();
  std::uniform_real_distribution<double> scale(0.2, 1.0);
  Q *= scale(rng);
  return affine_map(Q, Vec(0.5 * gaussian_vec(rng, d)), dom);
}

}  // namespace

TEST_CASE("theta terms stay inside the body") {
  const BodyPtr ball = std::make_shared<Ball>(Vec::Zero(3), 1.0);
  const ThetaSequence theta(ball);
  for (int j = 1; j <= 500; ++j) CHECK(ball->contains(theta.term(j), 1e-9));
}

TEST_CASE("theta density surrogate on a small-dimensional ball") {
  const BodyPtr ball = std::make_shared<Ball>(Vec::Zero(3), 1.0);
  const ThetaSequence theta(ball);
  const int terms = 10000;
  std::vector<Vec> cached;
  cached.reserve(terms);
  for (int j = 1; j <= terms; ++j) cached.push_back(theta.term(j));
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec x = sample_in_body(*ball, rng, 1.4);
    double best = kInf;
    for (const Vec& t : cached) best = std::min(best, (x - t).norm());
    CHECK(best < 0.1 * (1.0 + x.norm()));
  }
}

TEST_CASE("metric of a map against itself vanishes") {
  const BodyPtr dom = full(4);
  const MapPtr f = identity_map(dom);
  const ThetaSequence theta(dom);
  const MetricValue mv = d_theta(*f, *f, theta, 40);
  CHECK(mv.value == 0.0);
  CHECK(mv.tail_bound == doctest::Approx(std::ldexp(1.0, -40)));
}

TEST_CASE("identity vs unit shift has closed-form metric 1/2") {
  const BodyPtr dom = full(8);
  const ThetaSequence theta(dom);
  const MapPtr f = identity_map(dom);
  const MapPtr g = translation_map(Vec::Unit(8, 0), dom);
  const MetricValue mv = d_theta(*f, *g, theta, 40);
  // every term contributes 2^-j * (1/(1+1)); the series sums to 1/2
  CHECK(std::abs(mv.value - 0.5) <= mv.tail_bound);
  CHECK(mv.tail_bound <= 1e-12);
}

TEST_CASE("truncation stability and symmetry") {
  const BodyPtr dom = full(4);
  const ThetaSequence theta(dom);
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const MapPtr f = random_affine(rng, dom);
    const MapPtr g = random_affine(rng, dom);
    const MetricValue a = d_theta(*f, *g, theta, 12);
    const MetricValue b = d_theta(*f, *g, theta, 30);
    CHECK(std::abs(a.value - b.value) <= std::ldexp(1.0, -12));
    // symmetry is exact: identical sums of identical terms
    CHECK(d_theta(*g, *f, theta, 12).value == a.value);
  }
}

TEST_CASE("triangle inequality on truncated sums") {
  const BodyPtr dom = full(3);
  const ThetaSequence theta(dom);
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const MapPtr f = random_affine(rng, dom);
    const MapPtr g = random_affine(rng, dom);
    const MapPtr h = random_affine(rng, dom);
    const double fg = d_theta(*f, *g, theta, 20).value;
    const double gh = d_theta(*g, *h, theta, 20).value;
    const double fh = d_theta(*f, *h, theta, 20).value;
    CHECK(fh <= fg + gh + 1e-12);
  }
}

TEST_CASE("vanishing truncated metric pins the maps on the first terms") {
  const BodyPtr dom = full(3);
  const ThetaSequence theta(dom);
  const MapPtr f = identity_map(dom);
  const MapPtr g = identity_map(dom);
  const MetricValue mv = d_theta(*f, *g, theta, 15);
  REQUIRE(mv.value == 0.0);
  for (int j = 1; j <= 15; ++j)
    CHECK((f->evaluate(theta.term(j)) - g->evaluate(theta.term(j))).norm() == 0.0);
}

TEST_CASE("in_U matches the defining inequality") {
  const BodyPtr dom = full(3);
  const MapPtr f = identity_map(dom);
  const MapPtr g = translation_map(Vec::Unit(3, 0), dom);
  CHECK(in_U(*f, *f, Vec::Zero(3), 1e-12));
  CHECK(!in_U(*g, *f, Vec::Zero(3), 0.5));  // distance is exactly 1
  CHECK(in_U(*g, *f, Vec::Zero(3), 1.0 + 1e-9));
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const MapPtr a = random_affine(rng, dom);
    const MapPtr b = random_affine(rng, dom);
    const Vec x = 2.0 * gaussian_vec(rng, 3);
    std::uniform_real_distribution<double> ud(0.0, 3.0);
    const double eps = ud(rng);
    CHECK(in_U(*a, *b, x, eps) == ((a->evaluate(x) - b->evaluate(x)).norm() < eps));
  }
}

TEST_CASE("in_V iterates the maps and reduces to in_U at k=1") {
  const BodyPtr dom = full(3);
  const MapPtr f = identity_map(dom);
  const MapPtr g = translation_map(Vec::Unit(3, 0), dom);
  CHECK(in_V(*f, *f, Vec::Zero(3), 1e-12, 7));
  CHECK(!in_V(*g, *f, Vec::Zero(3), 2.5, 3));  // ||g^3(0)|| = 3
  CHECK(in_V(*g, *f, Vec::Zero(3), 3.0 + 1e-9, 3));
  Rng rng(29);
  for (int trial = 0; trial < 1000; ++trial) {
    const MapPtr a = random_affine(rng, dom);
    const MapPtr b = random_affine(rng, dom);
    const Vec x = 2.0 * gaussian_vec(rng, 3);
    std::uniform_real_distribution<double> ud(0.0, 3.0);
    const double eps = ud(rng);
    CHECK(in_V(*a, *b, x, eps, 1) == in_U(*a, *b, x, eps));
  }
}

TEST_CASE("slack in in_V survives orbit-wide perturbation budgets") {
  const BodyPtr dom = full(3);
  const ThetaSequence theta(dom);
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const MapPtr f = random_affine(rng, dom);
    const MapPtr g = random_affine(rng, dom);
    const Vec x = gaussian_vec(rng, 3);
    const int k = 4;
    Vec xf = x, xg = x;
    for (int i = 0; i < k; ++i) {
      xf = f->evaluate(xf);
      xg = g->evaluate(xg);
    }
    const double dist = (xf - xg).norm();
    const double eps = dist + 0.5;  // slack s = 0.5
    REQUIRE(in_V(*g, *f, x, eps, k));
    const double budget = 0.5 / (2.0 * k);
    // perturb g by a pointwise shift within the budget
    const MapPtr h = compose({translation_map(Vec(budget * Vec::Unit(3, 1)), dom), g});
    CHECK(in_V(*h, *f, x, eps, k));
  }
}

TEST_CASE("theta density surrogate on a small-dimensional tube") {
  Mat b = Mat::Zero(3, 1);
  b(0, 0) = 1.0;
  const BodyPtr tube = std::make_shared<Tube>(Subspace(b), 1.0);
  const ThetaSequence theta(tube);
  const int terms = 10000;
  std::vector<Vec> cached;
  cached.reserve(terms);
  for (int j = 1; j <= terms; ++j) cached.push_back(theta.term(j));
  Rng rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec x = sample_in_body(*tube, rng, 1.4);
    double best = kInf;
    for (const Vec& t : cached) best = std::min(best, (x - t).norm());
    CHECK(best < 0.1 * (1.0 + x.norm()));
  }
}
