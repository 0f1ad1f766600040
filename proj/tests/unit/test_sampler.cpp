#include <doctest.h>

#include <cmath>
#include <functional>

#include "lassoggm/metrics.hpp"
#include "lassoggm/sampler.hpp"
#include "lassoggm/simgen.hpp"

using namespace lassoggm;

namespace {

GgmChainState flat_state(Index p) {
  GgmChainState st;
  st.decomp = PrecisionDecomposition::identity(p);
  st.tau = Matrix::Constant(p, p, 0.5);
  st.q = Matrix::Constant(p, p, 0.5);
  return st;
}

double running_mean(int n, const std::function<double()>& step) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += step();
  return s / n;
}

}  // namespace

TEST_CASE("mcmc config") {
  McmcConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.retained() == 4000);
  cfg.iterations = 103;
  cfg.burn_in = 3;
  cfg.thin = 7;
  CHECK(cfg.retained() == 14);
  cfg.burn_in = 103;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.burn_in = 0;
  cfg.grid_points = 5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.grid_points = 100;
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("mh acceptance probability") {
  CHECK(mh_accept_probability(0.0) == 1.0);
  CHECK(mh_accept_probability(3.0) == 1.0);
  CHECK(mh_accept_probability(std::log(0.25)) == doctest::Approx(0.25));
  CHECK(mh_accept_probability(std::nan("")) == 0.0);
  CHECK(mh_accept_probability(-INFINITY) == 0.0);
}

TEST_CASE("retained draws follow the thinning schedule") {
  Rng rng(1);
  const DataMatrix y = simulate_data(SymMatrix::Identity(3, 3), 20, Vector::Zero(3), rng);
  McmcConfig cfg;
  cfg.iterations = 55;
  cfg.burn_in = 10;
  cfg.thin = 4;
  const ChainOutput out = run_chain(y, Hyperparameters{}, cfg);
  CHECK(out.states.size() == 11);
  CHECK(out.adjacency.size() == 11);
  CHECK(out.dim == 3);
}

TEST_CASE("initial state") {
  Rng rng(2);
  StructureSpec spec;
  spec.kind = Structure::banded;
  spec.p = 4;
  const DataMatrix y = simulate_data(generate(spec), 200, Vector::Zero(4), rng);
  const GgmPrior prior = Hyperparameters{}.ggm();
  const GgmChainState st = initial_state(y, prior);
  CHECK(is_pd(st.decomp.correlation(), 0.0));
  CHECK(st.tau(0, 1) == doctest::Approx(0.5 / 3.0));
  CHECK(st.q(0, 1) == doctest::Approx(0.5));
  CHECK(st.sigma2 == 1.0);
  CHECK(st.decomp.a(0, 1) == 1);
  const double sd0 = std::sqrt(y.y.row(0).squaredNorm() / 200.0);
  CHECK(st.decomp.s(0) == doctest::Approx(1.0 / sd0));

  // Too few samples: identity correlation, flat selection.
  const DataMatrix small = simulate_data(generate(spec), 3, Vector::Zero(4), rng);
  const GgmChainState s2 = initial_state(small, prior);
  CHECK(s2.decomp.a.sum() == 4);
}

TEST_CASE("edge update forces the edge when zero is outside the interval") {
  GgmChainState st = flat_state(3);
  st.decomp.a.setOnes();
  st.decomp.r << 1, 0.5, 0.8, 0.5, 1, 0.8, 0.8, 0.8, 1;
  Rng rng(3);
  const SuffStats none = SuffStats::empty(3);
  for (int k = 0; k < 200; ++k) {
    CHECK(update_edge(st, none, 0, 1, rng));
    CHECK(st.decomp.a(0, 1) == 1);
    CHECK(st.decomp.r(0, 1) > 0.28);
    CHECK(is_pd(st.decomp.correlation(), 0.0));
  }
}

TEST_CASE("fixed selection keeps A") {
  GgmChainState st = flat_state(3);
  Rng rng(4);
  const SuffStats none = SuffStats::empty(3);
  for (int k = 0; k < 50; ++k) {
    update_edge(st, none, 0, 2, rng, {}, true);
    CHECK(st.decomp.a(0, 2) == 0);
  }
  st.decomp.a.setOnes();
  for (int k = 0; k < 50; ++k) {
    update_edge(st, none, 0, 2, rng, {}, true);
    CHECK(st.decomp.a(0, 2) == 1);
  }
}

TEST_CASE("tau update with a vanishing edge probability recovers the IG prior") {
  GgmPrior prior;
  prior.tau_shape = 4.0;
  prior.tau_scale = 1.0;
  GgmChainState st = flat_state(2);
  st.q(0, 1) = st.q(1, 0) = 1e-12;
  Rng rng(5);
  const PdInterval iv{-1.0, 1.0};
  const double m = running_mean(400000, [&] {
    update_tau(st, 0, 1, iv, rng, 0.8, prior);
    return st.tau(0, 1);
  });
  CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(0.03));

  // Zero step: the proposal equals the current value and is always accepted.
  const double before = st.tau(0, 1);
  for (int k = 0; k < 10; ++k) CHECK(update_tau(st, 0, 1, iv, rng, 0.0, prior));
  CHECK(st.tau(0, 1) == before);
}

TEST_CASE("q target is flat when the edge is forced") {
  GgmPrior prior;
  GgmChainState st = flat_state(2);
  st.decomp.a.setOnes();
  st.decomp.r(0, 1) = st.decomp.r(1, 0) = 0.4;
  const PdInterval iv{0.2, 0.6};
  const double base = q_log_target(0.5, st, 0, 1, iv, prior);
  for (double q : {0.01, 0.3, 0.9}) CHECK(q_log_target(q, st, 0, 1, iv, prior) == doctest::Approx(base));

  // Long run: Beta(1, 1).
  Rng rng(6);
  double s = 0.0;
  double s2 = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    update_q(st, 0, 1, iv, rng, 1.5, prior);
    const double q = st.q(0, 1);
    CHECK((q > 0.0 && q < 1.0));
    s += q;
    s2 += q * q;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.03));
  CHECK(s2 / n - (s / n) * (s / n) == doctest::Approx(1.0 / 12.0).epsilon(0.05));
  const double before = st.q(0, 1);
  for (int k = 0; k < 10; ++k) CHECK(update_q(st, 0, 1, iv, rng, 0.0, prior));
  CHECK(st.q(0, 1) == before);
}

TEST_CASE("q and tau targets include the truncation constant") {
  GgmPrior prior;
  GgmChainState st = flat_state(2);
  const PdInterval iv{-0.5, 0.8};
  const double tau = 0.7;
  const double q = 0.3;
  st.q(0, 1) = q;
  st.tau(0, 1) = tau;
  const double logk = -std::log(truncation_constant_inverse(tau, q, iv));
  CHECK(q_log_target(q, st, 0, 1, iv, prior) == doctest::Approx(logk + std::log1p(-q)));
  CHECK(tau_log_target(tau, st, 0, 1, iv, prior) ==
        doctest::Approx(logk - std::log(tau) - 3.0 * std::log(tau) - 0.5 / tau));
}

TEST_CASE("sigma2 update") {
  GgmPrior prior;
  GgmChainState st = flat_state(3);
  const SuffStats zero{SymMatrix::Zero(3, 3), 10.0};
  Rng rng(7);
  // IG(2 + 15, 1): mean 1/16.
  const double m = running_mean(100000, [&] {
    update_sigma2(st, zero, rng, prior);
    return st.sigma2;
  });
  CHECK(m == doctest::Approx(1.0 / 16.0).epsilon(0.01));
}

TEST_CASE("S update") {
  GgmPrior prior;
  prior.s_shape = 4.0;
  prior.s_scale = 1.0;
  GgmChainState st = flat_state(2);
  Rng rng(8);
  const SuffStats none = SuffStats::empty(2);
  const double m = running_mean(400000, [&] {
    update_s(st, none, 0, rng, 0.5, prior);
    return st.decomp.s(0);
  });
  CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("S update at p = 1 against quadrature") {
  GgmPrior prior;
  GgmChainState st;
  st.decomp = PrecisionDecomposition::identity(1);
  st.tau = Matrix::Constant(1, 1, 1.0);
  st.q = Matrix::Constant(1, 1, 0.5);
  st.sigma2 = 1.0;
  const SuffStats stats{SymMatrix::Constant(1, 1, 7.5), 6.0};
  // Density proportional to s^(n-g-1) exp(-s^2 V / 2 - h / s).
  double z = 0.0;
  double zs = 0.0;
  const int m = 1000000;
  const double hi = 5.0;
  for (int k = 1; k <= m; ++k) {
    const double s = hi * k / m;
    const double w = std::exp(s_log_target(s, st, stats, 0, prior));
    z += w;
    zs += w * s;
  }
  const double expected = zs / z;
  Rng rng(9);
  const double mean = running_mean(300000, [&] {
    update_s(st, stats, 0, rng, 0.3, prior);
    return st.decomp.s(0);
  });
  CHECK(mean == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("strong correlation is recovered at p = 2") {
  Rng rng(10);
  SymMatrix cov(2, 2);
  cov << 1.0, 0.9, 0.9, 1.0;
  DataMatrix y = simulate_data(cov.inverse(), 200, Vector::Zero(2), rng);
  y = y.centered();
  const SuffStats s = SuffStats::of(y);
  const double sample_r = s.scatter(0, 1) / std::sqrt(s.scatter(0, 0) * s.scatter(1, 1));
  McmcConfig cfg;
  cfg.iterations = 3000;
  cfg.burn_in = 500;
  cfg.thin = 1;
  const PosteriorSummary sum = summarize(run_chain(y, Hyperparameters{}, cfg));
  CHECK(std::abs(-sum.mean_correlation(0, 1) - sample_r) < 0.1);
}

TEST_CASE("identity data gives sparse marginals and every state is PD") {
  McmcConfig cfg;
  cfg.iterations = 6000;
  cfg.burn_in = 1000;
  cfg.seed = 3;
  double mean_marginal[2];
  const Index sizes[2] = {25, 200};
  for (int t = 0; t < 2; ++t) {
    Rng rng(11);
    const DataMatrix y = simulate_data(SymMatrix::Identity(5, 5), sizes[t], Vector::Zero(5), rng);
    const ChainOutput chain = run_chain(y.centered(), Hyperparameters{}, cfg);
    for (const auto& st : chain.states) {
      CHECK(is_pd(st.decomp.correlation(), 0.0));
      CHECK(is_pd(st.decomp.precision(), 0.0));
      CHECK((st.q.array() > 0.0 && st.q.array() < 1.0).all());
    }
    const PosteriorSummary sum = summarize(chain);
    mean_marginal[t] = sum.edge_marginals.sum() / 20.0;
    CHECK(chain.acceptance.s.rate() > 0.1);
    CHECK(chain.acceptance.s.rate() < 0.9);
    if (sizes[t] == 200) CHECK(sum.edge_marginals.maxCoeff() < 0.5);
  }
  CHECK(mean_marginal[1] < mean_marginal[0]);
}

TEST_CASE("chains are deterministic given the seed") {
  Rng rng(12);
  const DataMatrix y = simulate_data(SymMatrix::Identity(4, 4), 15, Vector::Zero(4), rng);
  McmcConfig cfg;
  cfg.iterations = 300;
  cfg.burn_in = 50;
  cfg.seed = 77;
  const ChainOutput a = run_chain(y, Hyperparameters{}, cfg);
  const ChainOutput b = run_chain(y, Hyperparameters{}, cfg);
  CHECK(a.adjacency == b.adjacency);
  CHECK(a.states.back().decomp.r == b.states.back().decomp.r);
  cfg.seed = 78;
  const ChainOutput c = run_chain(y, Hyperparameters{}, cfg);
  CHECK(c.states.back().decomp.r != a.states.back().decomp.r);
}

TEST_CASE("effective precision divides by sigma2") {
  GgmChainState st = flat_state(2);
  st.sigma2 = 4.0;
  CHECK(effective_precision(st)(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("acceptance counters merge") {
  AcceptanceStats a;
  AcceptanceStats b;
  a.tau.record(true);
  b.tau.record(false);
  b.s.record(true);
  a.merge(b);
  CHECK(a.tau.proposed == 2);
  CHECK(a.tau.rate() == doctest::Approx(0.5));
  CHECK(a.s.accepted == 1);
  CHECK(a.q.rate() == 0.0);
}
