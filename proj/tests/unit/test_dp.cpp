#include <doctest.h>

#include <cmath>

#include "lassoggm/dp_mixture.hpp"
#include "lassoggm/simgen.hpp"

using namespace lassoggm;

namespace {

double off_diagonal_edges(const DpCluster& c) {
  const Index p = c.ggm.decomp.a.rows();
  double n = 0.0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) n += c.ggm.decomp.a(i, j);
  }
  return n;
}

}  // namespace

TEST_CASE("crp expected clusters") {
  CHECK(crp_expected_clusters(1.0, 1) == doctest::Approx(1.0));
  CHECK(crp_expected_clusters(1.0, 3) == doctest::Approx(1.0 + 0.5 + 1.0 / 3.0));
  CHECK(crp_expected_clusters(2.0, 2) == doctest::Approx(1.0 + 2.0 / 3.0));
  // Grows like alpha ln n.
  CHECK(crp_expected_clusters(1.0, 100000) == doctest::Approx(std::log(100000.0) + 0.5772).epsilon(1e-4));
}

TEST_CASE("base draws are positive definite") {
  Rng rng(1);
  Hyperparameters hp;
  for (int t = 0; t < 500; ++t) {
    const DpCluster c = draw_from_base(hp, 6, rng);
    CHECK(is_pd(c.ggm.decomp.correlation(), 1e-8));
    CHECK(is_pd(c.omega, 0.0));
    CHECK(c.theta.size() == 6);
    CHECK(c.ggm.sigma2 == 1.0);
    CHECK((c.ggm.decomp.correlation().diagonal().array() - 1.0).abs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("base edge counts follow the selection prior") {
  Rng rng(2);
  Hyperparameters dense;
  dense.nu_c = 200.0;
  dense.nu_d = 0.01;
  Hyperparameters sparse;
  sparse.nu_c = 0.01;
  sparse.nu_d = 200.0;
  double many = 0.0;
  double few = 0.0;
  const int draws = 300;
  for (int t = 0; t < draws; ++t) {
    many += off_diagonal_edges(draw_from_base(dense, 5, rng)) / draws;
    few += off_diagonal_edges(draw_from_base(sparse, 5, rng)) / draws;
  }
  CHECK(few < 0.1);
  CHECK(many > 9.0);
}

TEST_CASE("base theta is N(0, Omega^-1)") {
  Rng rng(3);
  Hyperparameters hp;
  const int draws = 20000;
  double quad = 0.0;
  double quad2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    const DpCluster c = draw_from_base(hp, 4, rng);
    const double v = c.theta.dot(c.omega * c.theta);
    quad += v / draws;
    quad2 += v * v / draws;
  }
  // theta' Omega theta ~ chi^2_4.
  CHECK(std::abs(quad - 4.0) < 4.0 * std::sqrt(8.0 / draws));
  CHECK(quad2 - quad * quad == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("cluster density") {
  Rng rng(4);
  DpCluster c = draw_from_base(Hyperparameters{}, 3, rng);
  const Vector y = Vector::Constant(3, 0.3);
  const Matrix one = y;
  CHECK(c.log_density(y) == doctest::Approx(log_normal_density(one, c.theta, c.omega)(0)));
}

TEST_CASE("state check") {
  DpState st;
  st.assignments = {0, 0, 1};
  Rng rng(5);
  st.clusters[0] = draw_from_base(Hyperparameters{}, 2, rng);
  st.clusters[1] = draw_from_base(Hyperparameters{}, 2, rng);
  st.sizes = {{0, 2}, {1, 1}};
  CHECK_NOTHROW(st.check());
  CHECK(st.active() == 2);
  st.sizes[1] = 2;
  CHECK_THROWS_AS(st.check(), std::logic_error);
  st.sizes[1] = 1;
  st.clusters[7] = st.clusters[0];
  CHECK_THROWS_AS(st.check(), std::logic_error);
}

TEST_CASE("single observation stays a singleton") {
  Rng rng(6);
  DpState st;
  st.assignments = {0};
  st.clusters[0] = draw_from_base(Hyperparameters{}, 2, rng);
  st.sizes = {{0, 1}};
  st.next_id = 1;
  DataMatrix y;
  y.y = Matrix::Zero(2, 1);
  update_assignment(st, y, 0, Hyperparameters{}, rng);
  CHECK(st.active() == 1);
  CHECK_NOTHROW(st.check());
}

TEST_CASE("assignment keeps the state consistent") {
  Rng rng(7);
  Hyperparameters hp;
  DataMatrix y;
  y.y = Matrix::Random(3, 20);
  DpState st;
  st.assignments.assign(20, 0);
  st.clusters[0] = draw_from_base(hp, 3, rng);
  st.sizes = {{0, 20}};
  st.next_id = 1;
  for (int sweep = 0; sweep < 30; ++sweep) {
    for (Index i = 0; i < 20; ++i) update_assignment(st, y, i, hp, rng);
    CHECK_NOTHROW(st.check());
  }
}

TEST_CASE("DP chain on separated clusters") {
  Rng rng(8);
  const DataMatrix a = simulate_data(SymMatrix::Identity(2, 2), 30, Vector::Constant(2, 6.0), rng);
  const DataMatrix b = simulate_data(SymMatrix::Identity(2, 2), 30, Vector::Constant(2, -6.0), rng);
  DataMatrix y;
  y.y = Matrix(2, 60);
  y.y << a.y, b.y;
  McmcConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 100;
  cfg.thin = 2;
  cfg.seed = 9;
  const DpFit fit = run_dp_chain(y, Hyperparameters{}, cfg);
  CHECK(fit.d_n.size() == 100);
  double total = 0.0;
  for (const auto& [k, prob] : fit.d_n_posterior) total += prob;
  CHECK(total == doctest::Approx(1.0));
  CHECK(fit.d_n_mode == 2);
  CHECK(fit.co_clustering(0, 1) > 0.9);
  CHECK(fit.co_clustering(0, 45) < 0.1);
  CHECK(fit.means.size() == fit.edge_marginals.size());

  const DpFit again = run_dp_chain(y, Hyperparameters{}, cfg);
  CHECK(again.d_n == fit.d_n);
  CHECK(again.point_partition == fit.point_partition);
}
