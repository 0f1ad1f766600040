#include "lassoggm/dp_mixture.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lassoggm/graph.hpp"

namespace lassoggm {

void DpCluster::refresh() {
  omega = ggm.decomp.precision();
  factor.compute(omega);
  if (factor.info() != Eigen::Success) {
    throw NotPositiveDefinite("dp cluster: precision is not positive definite");
  }
  log_det = 2.0 * Matrix(factor.matrixL()).diagonal().array().log().sum();
}

double DpCluster::log_density(const Vector& y) const {
  const Vector z = factor.matrixU() * (y - theta);
  const double p = static_cast<double>(y.size());
  return -0.5 * p * std::log(2.0 * std::numbers::pi) + 0.5 * log_det - 0.5 * z.squaredNorm();
}

void DpState::check() const {
  std::map<int, int> counted;
  for (int c : assignments) {
    if (!sizes.contains(c)) throw std::logic_error("dp: assignment to a missing cluster");
    ++counted[c];
  }
  if (counted != sizes) throw std::logic_error("dp: cluster sizes out of sync");
  for (const auto& [id, n] : sizes) {
    if (n < 1) throw std::logic_error("dp: empty cluster");
    if (!clusters.contains(id)) throw std::logic_error("dp: cluster without parameters");
  }
  if (clusters.size() != sizes.size()) throw std::logic_error("dp: orphan cluster parameters");
}

namespace {

// With no data the (A_ij, R_ij) conditional is an atom at A = 0 plus a
// truncated Laplace slab, so it is drawn exactly instead of on a grid.
bool prior_edge_draw(GgmChainState& st, Index i, Index j, Rng& rng, double eps) {
  const SymMatrix c = st.decomp.correlation();
  const PdInterval iv = shrink(pd_interval(c, i, j, c(i, j)), eps);
  const double tau = st.tau(i, j);
  const double q = st.q(i, j);
  const double absent = iv.contains(0.0) ? (1.0 - q) * -std::expm1(-1.0 / tau) : 0.0;
  const double present = 0.5 * q * laplace_window(iv.lo, iv.hi, tau);
  if (!(absent + present > 0.0)) return false;
  if (rng.uniform() * (absent + present) < absent) {
    st.decomp.a(i, j) = st.decomp.a(j, i) = 0;
    st.decomp.r(i, j) = st.decomp.r(j, i) = truncated_laplace(rng, tau, -1.0, 1.0);
  } else {
    st.decomp.a(i, j) = st.decomp.a(j, i) = 1;
    st.decomp.r(i, j) = st.decomp.r(j, i) = truncated_laplace(rng, tau, iv.lo, iv.hi);
  }
  return true;
}

}  // namespace

DpCluster draw_from_base(const Hyperparameters& hp, Index p, Rng& rng, const GridSpec& grid,
                         int retries) {
  for (int attempt = 0; attempt < retries; ++attempt) {
    DpCluster cl;
    GgmChainState& st = cl.ggm;
    st.decomp = PrecisionDecomposition::identity(p);
    st.tau = Matrix::Ones(p, p);
    st.q = Matrix::Constant(p, p, 0.5);
    for (Index i = 0; i < p; ++i) {
      for (Index j = i + 1; j < p; ++j) {
        st.tau(i, j) = st.tau(j, i) = rng.inv_gamma(hp.nu_e, hp.nu_f);
        st.q(i, j) = st.q(j, i) = rng.beta(hp.nu_c, hp.nu_d);
      }
    }
    for (Index i = 0; i < p; ++i) st.decomp.s(i) = rng.inv_gamma(hp.nu_alpha, hp.nu_beta);
    bool ok = true;
    for (Index i = 0; i < p && ok; ++i) {
      for (Index j = i + 1; j < p && ok; ++j) {
        try {
          ok = prior_edge_draw(st, i, j, rng, grid.eps);
        } catch (const NumericalError&) {
          ok = false;
        }
      }
    }
    if (!ok || !is_pd(st.decomp.correlation(), grid.eps)) continue;
    const SymMatrix omega = st.decomp.precision();
    if (!is_pd(omega)) continue;
    cl.theta = mvn_from_precision(rng, Vector::Zero(p), omega);
    cl.refresh();
    return cl;
  }
  throw NumericalError("draw_from_base: no positive definite draw after " +
                       std::to_string(retries) + " attempts");
}

void update_assignment(DpState& st, const DataMatrix& y, Index i, const Hyperparameters& hp,
                       Rng& rng, const DpOptions& opts, const GridSpec& grid) {
  const Index n = y.n();
  if (n <= 1) return;
  const auto ui = static_cast<std::size_t>(i);
  const Vector yi = y.y.col(i);
  const double nm1 = static_cast<double>(n - 1);
  auto log_f = [&](const DpCluster& c) {
    if (opts.ablate_likelihood) return 0.0;
    const double v = c.log_density(yi);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };
  auto move = [&](int to) {
    const int from = st.assignments[ui];
    st.assignments[ui] = to;
    ++st.sizes[to];
    if (--st.sizes[from] == 0) {
      st.sizes.erase(from);
      st.clusters.erase(from);
    }
  };

  const int c = st.assignments[ui];
  if (st.sizes.at(c) > 1) {
    DpCluster star = opts.ablate_likelihood
                         ? DpCluster{}
                         : draw_from_base(hp, y.p(), rng, grid, opts.base_retries);
    const double log_r = std::log(st.alpha / nm1) + log_f(star) - log_f(st.clusters.at(c));
    if (rng.uniform() < mh_accept_probability(log_r)) {
      const int id = st.next_id++;
      st.clusters.emplace(id, std::move(star));
      st.sizes[id] = 0;
      move(id);
    }
  } else {
    // Cluster of a uniformly chosen other point: probability n_c / (n - 1).
    std::size_t j = rng.index(static_cast<std::size_t>(n - 1));
    if (j >= ui) ++j;
    const int target = st.assignments[j];
    const double log_r =
        std::log(nm1 / st.alpha) + log_f(st.clusters.at(target)) - log_f(st.clusters.at(c));
    if (rng.uniform() < mh_accept_probability(log_r)) move(target);
  }

  const int now = st.assignments[ui];
  if (st.sizes.at(now) <= 1) return;
  std::vector<int> ids;
  std::vector<double> lw;
  for (const auto& [id, size] : st.sizes) {
    const int others = size - (id == now ? 1 : 0);
    ids.push_back(id);
    lw.push_back(std::log(static_cast<double>(others) / nm1) + log_f(st.clusters.at(id)));
  }
  std::size_t pick = 0;
  try {
    pick = sample_log_weights(rng, lw);
  } catch (const EmptyTable&) {
    return;
  }
  if (ids[pick] != now) move(ids[pick]);
}

void update_cluster_params(DpState& st, const DataMatrix& y, const Hyperparameters& hp,
                           const SweepOptions& opts, Rng& rng, AcceptanceStats& acc) {
  const GgmPrior prior = hp.dp_base();
  std::map<int, std::vector<Index>> groups;
  for (std::size_t i = 0; i < st.assignments.size(); ++i) {
    groups[st.assignments[i]].push_back(static_cast<Index>(i));
  }
  for (auto& [id, cl] : st.clusters) {
    const auto& idx = groups.at(id);
    const DataMatrix sub = y.columns(idx);
    SuffStats stats = SuffStats::of(sub, cl.theta);
    stats.scatter += cl.theta * cl.theta.transpose();
    stats.n += 1.0;
    sweep(cl.ggm, stats, prior, opts, rng, acc);
    const double m = static_cast<double>(idx.size()) + 1.0;
    const Vector mean = sub.y.rowwise().sum() / m;
    const SymMatrix omega = cl.ggm.decomp.precision();
    cl.theta = mvn_from_precision(rng, mean, m * omega);
    cl.refresh();
  }
}

double crp_expected_clusters(double alpha, Index n) {
  double e = 0.0;
  for (Index m = 1; m <= n; ++m) e += alpha / (alpha + static_cast<double>(m) - 1.0);
  return e;
}

namespace {

struct ClusterSnapshot {
  SymMatrix a;
  SymMatrix c;
  Vector theta;
};

struct DpDraw {
  std::vector<int> assignments;
  std::map<int, ClusterSnapshot> clusters;
};

}  // namespace

DpFit run_dp_chain(const DataMatrix& data, const Hyperparameters& hp, const McmcConfig& cfg,
                   const DpOptions& opts) {
  cfg.validate();
  if (data.n() < 1 || data.p() < 2) throw std::invalid_argument("dp: need p >= 2 and n >= 1");
  if (opts.init_clusters < 1) throw std::invalid_argument("dp: init_clusters must be positive");
  const Index p = data.p();
  hp.validate(p);
  const GgmPrior prior = hp.dp_base();
  SweepOptions sweep_opts = SweepOptions::from(cfg);
  sweep_opts.update_sigma2 = false;

  DpFit fit;
  fit.center = data.mean();
  const DataMatrix y = data.centered();
  Rng rng(cfg.seed);

  DpState st;
  st.alpha = hp.dp_alpha;
  const int k0 = static_cast<int>(std::min<Index>(opts.init_clusters, y.n()));
  const Partition z0 = kmeans(y.y, k0, rng);
  st.assignments.assign(z0.begin(), z0.end());
  for (int j = 0; j < k0; ++j) {
    const auto idx = members(z0, j);
    if (idx.empty()) continue;
    st.sizes[j] = static_cast<int>(idx.size());
    DpCluster cl;
    if (!opts.ablate_likelihood) {
      const DataMatrix sub = y.columns(idx);
      cl.theta = sub.mean();
      cl.ggm = initial_state(SuffStats::of(sub, cl.theta), prior);
      cl.refresh();
    }
    st.clusters.emplace(j, std::move(cl));
  }
  st.next_id = k0;

  std::vector<DpDraw> draws;
  for (int it = 0; it < cfg.iterations; ++it) {
    try {
      for (Index i = 0; i < y.n(); ++i) update_assignment(st, y, i, hp, rng, opts, sweep_opts.grid);
      if (!opts.ablate_likelihood) update_cluster_params(st, y, hp, sweep_opts, rng, fit.acceptance);
    } catch (const ChainAborted& e) {
      throw ChainAborted(it, e.parameter(), e.reason());
    } catch (const NumericalError& e) {
      throw ChainAborted(it, "dp", e.what());
    }
    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0) {
      fit.partitions.push_back(relabel_by_size(st.assignments));
      fit.d_n.push_back(st.active());
      if (!opts.ablate_likelihood) {
        DpDraw d{st.assignments, {}};
        for (const auto& [id, cl] : st.clusters) {
          d.clusters.emplace(id, ClusterSnapshot{cl.ggm.decomp.a.cast<double>(),
                                                 cl.ggm.decomp.correlation(), cl.theta});
        }
        draws.push_back(std::move(d));
      }
    }
  }

  const double total = static_cast<double>(fit.d_n.size());
  for (int d : fit.d_n) fit.d_n_posterior[d] += 1.0 / total;
  double best = -1.0;
  for (const auto& [d, pr] : fit.d_n_posterior) {
    if (pr > best) {
      best = pr;
      fit.d_n_mode = d;
    }
  }
  fit.co_clustering = co_clustering(fit.partitions);
  fit.point_partition = binder_point_partition(fit.partitions, fit.co_clustering);
  if (opts.ablate_likelihood) return fit;

  const int k = cluster_count(fit.point_partition);
  for (int c = 0; c < k; ++c) {
    const auto idx = members(fit.point_partition, c);
    SymMatrix a = SymMatrix::Zero(p, p);
    SymMatrix corr = SymMatrix::Zero(p, p);
    Vector theta = Vector::Zero(p);
    for (const auto& d : draws) {
      std::map<int, int> votes;
      for (Index i : idx) ++votes[d.assignments[static_cast<std::size_t>(i)]];
      int host = votes.begin()->first;
      for (const auto& [id, v] : votes) {
        if (v > votes[host]) host = id;
      }
      const auto& snap = d.clusters.at(host);
      a += snap.a;
      corr += snap.c;
      theta += snap.theta;
    }
    const double m = static_cast<double>(draws.size());
    a /= m;
    a.diagonal().setZero();
    fit.edge_marginals.push_back(a);
    fit.mean_correlations.push_back(corr / m);
    fit.means.push_back(theta / m + fit.center);
  }
  return fit;
}

}  // namespace lassoggm
