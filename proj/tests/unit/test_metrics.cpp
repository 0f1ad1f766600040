#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "lassoggm/metrics.hpp"
#include "lassoggm/partition.hpp"
#include "lassoggm/simgen.hpp"

using namespace lassoggm;

TEST_CASE("kl loss") {
  const SymMatrix i2 = SymMatrix::Identity(2, 2);
  CHECK(std::abs(kl_loss(i2, i2)) < 1e-12);
  CHECK(std::abs(kl_loss(i2, 2.0 * i2) - (2.0 * std::log(2.0) - 1.0)) < 1e-10);

  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const SymMatrix a = random_pd_correlation(4, rng);
    const SymMatrix b = random_pd_correlation(4, rng);
    const Vector lam = Eigen::GeneralizedSelfAdjointEigenSolver<Matrix>(a, b).eigenvalues();
    const double oracle = (lam.array() - lam.array().log() - 1.0).sum();
    CHECK(std::abs(kl_loss(a, b) - oracle) < 1e-10);
    CHECK(kl_loss(a, b) >= 0.0);
    CHECK(std::abs(kl_loss(a, a)) < 1e-10);
  }
  SymMatrix bad = SymMatrix::Ones(2, 2);
  CHECK_THROWS_AS(kl_loss(i2, bad), NotPositiveDefinite);
}

TEST_CASE("confusion metrics") {
  StructureSpec spec;
  spec.kind = Structure::banded;
  spec.p = 10;
  const Adjacency truth = support(generate(spec));
  const ConfusionCounts perfect = confusion(truth, truth);
  CHECK(perfect.total() == 45);
  CHECK(mcc(perfect) == doctest::Approx(1.0));
  CHECK(sensitivity(perfect) == 1.0);
  CHECK(specificity(perfect) == 1.0);

  Adjacency est = truth;
  est(0, 1) = est(1, 0) = 0;  // one missed edge
  est(0, 5) = est(5, 0) = 1;  // one false edge
  const ConfusionCounts c = confusion(truth, est);
  CHECK(c.tp == 8);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 35);
  CHECK(mcc(c) == doctest::Approx((35.0 * 8.0 - 1.0) / std::sqrt(36.0 * 9.0 * 9.0 * 36.0)));
  // (8 * 35 - 1 * 1) / sqrt(9 * 9 * 36 * 36)
  CHECK(mcc(c) == doctest::Approx(279.0 / 324.0));
  CHECK(false_positive_rate(c) == doctest::Approx(1.0 / 36.0));
  CHECK(false_negative_rate(c) == doctest::Approx(1.0 / 9.0));

  const Adjacency none = Adjacency::Identity(10, 10);
  const ConfusionCounts e = confusion(truth, none);
  CHECK(sensitivity(e) == 0.0);
  CHECK(std::isnan(mcc(e)));
}

TEST_CASE("mcc properties") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    Adjacency a = Adjacency::Identity(6, 6);
    Adjacency b = Adjacency::Identity(6, 6);
    Adjacency flip = Adjacency::Identity(6, 6);
    for (Index i = 0; i < 6; ++i) {
      for (Index j = i + 1; j < 6; ++j) {
        a(i, j) = a(j, i) = rng.uniform() < 0.4;
        b(i, j) = b(j, i) = rng.uniform() < 0.4;
        flip(i, j) = flip(j, i) = 1 - b(i, j);
      }
    }
    const ConfusionCounts c = confusion(a, b);
    CHECK(c.total() == 15);
    const double m = mcc(c);
    if (std::isnan(m)) continue;
    CHECK((m >= -1.0 && m <= 1.0));
    CHECK(mcc(confusion(a, flip)) == doctest::Approx(-m));
  }
}

TEST_CASE("thresholding on the partial correlation scale") {
  SymMatrix prec(3, 3);
  prec << 4.0, -0.4, 0.0, -0.4, 1.0, 0.9, 0.0, 0.9, 9.0;
  const SymMatrix pc = partial_correlation(prec);
  CHECK(pc(0, 1) == doctest::Approx(0.2));
  CHECK(pc(1, 2) == doctest::Approx(-0.3));
  const Adjacency t0 = threshold_edges(prec, 0.0);
  CHECK(t0(0, 1) == 1);
  CHECK(t0(0, 2) == 0);
  const Adjacency t25 = threshold_edges(prec, 0.25);
  CHECK(t25(0, 1) == 0);
  CHECK(t25(1, 2) == 1);
  CHECK(threshold_edges(prec, 1.0).sum() == 3);
  CHECK_THROWS_AS(threshold_edges(prec, -0.1), std::invalid_argument);
}

TEST_CASE("predictive squared error") {
  Matrix a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  CHECK(predictive_squared_error(a, a) == 0.0);
  CHECK(predictive_squared_error(a.array() + 0.5, a) == doctest::Approx(0.25));
  Matrix b = a;
  b(0, 0) = 4;  // 9
  b(1, 2) = 4;  // 4
  b(2, 1) = 9;  // 1
  CHECK(predictive_squared_error(b, a) == doctest::Approx(14.0 / 9.0));
  CHECK_THROWS_AS(predictive_squared_error(a, Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("adjusted rand index") {
  const std::vector<int> z = {0, 0, 1, 1, 2, 2};
  CHECK(adjusted_rand_index(z, z) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index(z, {5, 5, 3, 3, 9, 9}) == doctest::Approx(1.0));
  // Hand computed: sum_ij C(n_ij, 2) = 2, rows 3 + 3, columns 1 + 1 + 1.
  const std::vector<int> a = {0, 0, 0, 1, 1, 1};
  const std::vector<int> b = {0, 0, 1, 1, 2, 2};
  const double expected = (2.0 - 6.0 * 3.0 / 15.0) / (0.5 * (6.0 + 3.0) - 6.0 * 3.0 / 15.0);
  CHECK(adjusted_rand_index(a, b) == doctest::Approx(expected));
  CHECK_THROWS_AS(adjusted_rand_index(a, {0, 1}), std::invalid_argument);
}

TEST_CASE("co-clustering and Binder point partition") {
  const std::vector<Partition> draws = {{0, 0, 1}, {0, 0, 1}, {1, 1, 1}, {2, 2, 7}};
  const SymMatrix co = co_clustering(draws);
  CHECK(co(0, 1) == 1.0);
  CHECK(co(0, 2) == doctest::Approx(0.25));
  CHECK(co(2, 2) == 1.0);
  CHECK(binder_loss({0, 0, 1}, co) == doctest::Approx(0.25 + 0.25));
  CHECK(binder_loss({0, 0, 0}, co) == doctest::Approx(0.75 + 0.75));
  const Partition best = binder_point_partition(draws, co);
  CHECK(best == Partition{0, 0, 1});
  CHECK(cluster_count(best) == 2);
  CHECK(relabel_by_size({4, 9, 9, 4, 9, 1}) == Partition{1, 0, 0, 1, 0, 2});
  CHECK(relabel_by_size({3, 3, 5, 5}) == Partition{0, 0, 1, 1});
  CHECK_THROWS_AS(binder_point_partition({}, co), std::invalid_argument);
}
