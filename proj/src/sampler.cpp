#include "lassoggm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lassoggm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_truncation_constant(double tau, double q, const PdInterval& iv) {
  const double inv = truncation_constant_inverse(tau, q, iv);
  return inv > 0.0 ? -std::log(inv) : kNegInf;
}

bool metropolis(Rng& rng, double log_ratio) {
  return rng.uniform() < mh_accept_probability(log_ratio);
}

// Draws (A_ij, R_ij) given the cached correlation matrix c and writes the
// new value back into c. Reverts on a failed PD check.
bool edge_step(GgmChainState& st, SymMatrix& c, const SuffStats& stats, Index i, Index j,
               const DetQuadratic& det, const PdInterval& iv, const GridSpec& grid,
               bool fix_selection, Rng& rng) {
  EdgeTable table = edge_table(stats, st, i, j, det, iv, grid);
  if (fix_selection) {
    if (st.decomp.a(i, j) == 0) {
      // Only the absent atom is allowed; R is drawn from its prior.
      if (!std::isfinite(table.absent_log_weight)) return false;
      const double r = truncated_laplace(rng, st.tau(i, j), -1.0, 1.0);
      st.decomp.r(i, j) = st.decomp.r(j, i) = r;
      return true;
    }
    table.absent_log_weight = kNegInf;
  }

  std::vector<double> lw;
  lw.reserve(table.grid.size() + 1);
  lw.push_back(table.absent_log_weight);
  lw.insert(lw.end(), table.present_log_weight.begin(), table.present_log_weight.end());
  std::size_t pick = 0;
  try {
    pick = sample_log_weights(rng, lw);
  } catch (const EmptyTable&) {
    return false;
  }

  const int old_a = st.decomp.a(i, j);
  const double old_r = st.decomp.r(i, j);
  const double old_c = c(i, j);
  int new_a = 0;
  double new_r = 0.0;
  double new_c = 0.0;
  if (pick == 0) {
    new_r = truncated_laplace(rng, st.tau(i, j), -1.0, 1.0);
  } else {
    new_a = 1;
    new_r = table.grid[pick - 1];
    new_c = new_r;
  }
  c(i, j) = c(j, i) = new_c;
  if (!is_pd(c)) {
    c(i, j) = c(j, i) = old_c;
    st.decomp.a(i, j) = st.decomp.a(j, i) = old_a;
    st.decomp.r(i, j) = st.decomp.r(j, i) = old_r;
    return false;
  }
  st.decomp.a(i, j) = st.decomp.a(j, i) = new_a;
  st.decomp.r(i, j) = st.decomp.r(j, i) = new_r;
  return true;
}

double trace_omega_v(const GgmChainState& st, const SymMatrix& c, const SuffStats& stats) {
  const Vector& s = st.decomp.s;
  return (s.asDiagonal() * c * s.asDiagonal()).cwiseProduct(stats.scatter).sum();
}

double s_log_target_cached(double s, const GgmChainState& st, const SymMatrix& c,
                           const SuffStats& stats, Index i, const GgmPrior& prior) {
  if (!(s > 0.0)) return kNegInf;
  const Vector& sv = st.decomp.s;
  double cross = 0.0;
  for (Index l = 0; l < sv.size(); ++l) {
    if (l != i) cross += c(i, l) * sv(l) * stats.scatter(i, l);
  }
  const double quad = stats.scatter(i, i) * s * s + 2.0 * s * cross;
  return stats.n * std::log(s) - quad / (2.0 * st.sigma2) - (prior.s_shape + 1.0) * std::log(s) -
         prior.s_scale / s;
}

bool s_step(GgmChainState& st, const SymMatrix& c, const SuffStats& stats, Index i, Rng& rng,
            double step, const GgmPrior& prior) {
  const double cur = st.decomp.s(i);
  const double prop = cur * std::exp(step * rng.normal());
  const double log_ratio = s_log_target_cached(prop, st, c, stats, i, prior) -
                           s_log_target_cached(cur, st, c, stats, i, prior) +
                           std::log(prop / cur);
  if (!metropolis(rng, log_ratio)) return false;
  st.decomp.s(i) = prop;
  return true;
}

void check_finite(const GgmChainState& st) {
  if (!std::isfinite(st.sigma2) || !(st.sigma2 > 0.0)) {
    throw ChainAborted(-1, "sigma2", "non-finite or nonpositive value");
  }
  if (!st.decomp.s.allFinite() || !(st.decomp.s.array() > 0.0).all()) {
    throw ChainAborted(-1, "S", "non-finite or nonpositive scale");
  }
  if (!st.decomp.r.allFinite()) throw ChainAborted(-1, "R", "non-finite shrinkage entry");
}

}  // namespace

void McmcConfig::validate() const {
  if (iterations <= 0) throw std::invalid_argument("mcmc: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) {
    throw std::invalid_argument("mcmc: burn_in must lie in [0, iterations)");
  }
  if (thin < 1) throw std::invalid_argument("mcmc: thin must be at least 1");
  if (grid_points < 10) throw std::invalid_argument("mcmc: grid_points must be at least 10");
  if (!(steps.tau > 0.0) || !(steps.q > 0.0) || !(steps.s > 0.0)) {
    throw std::invalid_argument("mcmc: proposal steps must be positive");
  }
}

SweepOptions SweepOptions::from(const McmcConfig& cfg) {
  SweepOptions o;
  o.grid.points = cfg.grid_points;
  o.steps = cfg.steps;
  return o;
}

void AcceptanceStats::merge(const AcceptanceStats& other) noexcept {
  for (auto [mine, theirs] : {std::pair{&edge, &other.edge}, std::pair{&tau, &other.tau},
                              std::pair{&q, &other.q}, std::pair{&s, &other.s}}) {
    mine->accepted += theirs->accepted;
    mine->proposed += theirs->proposed;
  }
}

ChainAborted::ChainAborted(long iteration, std::string parameter, const std::string& reason)
    : NumericalError("chain aborted at iteration " + std::to_string(iteration) + " while updating " +
                     parameter + ": " + reason),
      iteration_(iteration),
      parameter_(std::move(parameter)),
      reason_(reason) {}

GgmChainState initial_state(const SuffStats& stats, const GgmPrior& prior) {
  const Index p = stats.scatter.rows();
  GgmChainState st;
  st.decomp = PrecisionDecomposition::identity(p);
  st.tau = Matrix::Constant(p, p, prior.tau_scale / (prior.tau_shape + 1.0));
  st.q = Matrix::Constant(p, p, prior.q_a / (prior.q_a + prior.q_b));
  st.sigma2 = 1.0;

  if (stats.n > 0.0) {
    const SymMatrix cov = stats.scatter / stats.n;
    for (Index i = 0; i < p; ++i) {
      const double v = cov(i, i);
      st.decomp.s(i) = v > 0.0 ? std::clamp(1.0 / std::sqrt(v), 1e-3, 1e3) : 1.0;
    }
    if (stats.n > static_cast<double>(p) && is_pd(cov)) {
      const SymMatrix pc = to_correlation(inverse_pd(cov));
      SymMatrix c = 0.5 * (pc + SymMatrix::Identity(p, p));
      if (is_pd(c)) {
        for (Index i = 0; i < p; ++i) {
          for (Index j = i + 1; j < p; ++j) {
            const int a = std::abs(c(i, j)) > 1e-3 ? 1 : 0;
            st.decomp.a(i, j) = st.decomp.a(j, i) = a;
            st.decomp.r(i, j) = st.decomp.r(j, i) = c(i, j);
          }
        }
      }
    }
  }
  return st;
}

GgmChainState initial_state(const DataMatrix& y, const GgmPrior& prior) {
  return initial_state(SuffStats::of(y), prior);
}

double mh_accept_probability(double log_ratio) noexcept {
  if (std::isnan(log_ratio)) return 0.0;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

double tau_log_target(double tau, const GgmChainState& st, Index i, Index j,
                      const PdInterval& iv, const GgmPrior& prior) {
  if (!(tau > 0.0)) return kNegInf;
  const double ar = st.decomp.a(i, j) != 0 ? std::abs(st.decomp.r(i, j)) : 0.0;
  return log_truncation_constant(tau, st.q(i, j), iv) - std::log(tau) - ar / tau -
         (prior.tau_shape + 1.0) * std::log(tau) - prior.tau_scale / tau;
}

double q_log_target(double q, const GgmChainState& st, Index i, Index j, const PdInterval& iv,
                    const GgmPrior& prior) {
  if (!(q > 0.0 && q < 1.0)) return kNegInf;
  const double a = st.decomp.a(i, j) != 0 ? 1.0 : 0.0;
  return log_truncation_constant(st.tau(i, j), q, iv) + (a + prior.q_a - 1.0) * std::log(q) +
         (prior.q_b - a) * std::log1p(-q);
}

double s_log_target(double s, const GgmChainState& st, const SuffStats& stats, Index i,
                    const GgmPrior& prior) {
  return s_log_target_cached(s, st, st.decomp.correlation(), stats, i, prior);
}

bool update_edge(GgmChainState& st, const SuffStats& stats, Index i, Index j, Rng& rng,
                 const GridSpec& grid, bool fix_selection) {
  SymMatrix c = st.decomp.correlation();
  const DetQuadratic det = det_quadratic(c, i, j);
  const PdInterval iv = pd_interval(det, c(i, j));
  return edge_step(st, c, stats, i, j, det, iv, grid, fix_selection, rng);
}

bool update_tau(GgmChainState& st, Index i, Index j, const PdInterval& iv, Rng& rng, double step,
                const GgmPrior& prior) {
  const double cur = st.tau(i, j);
  const double prop = cur * std::exp(step * rng.normal());
  const double log_ratio = tau_log_target(prop, st, i, j, iv, prior) -
                           tau_log_target(cur, st, i, j, iv, prior) + std::log(prop / cur);
  if (!metropolis(rng, log_ratio)) return false;
  st.tau(i, j) = st.tau(j, i) = prop;
  return true;
}

bool update_q(GgmChainState& st, Index i, Index j, const PdInterval& iv, Rng& rng, double step,
              const GgmPrior& prior) {
  const double cur = st.q(i, j);
  const double prop = logistic(std::log(cur / (1.0 - cur)) + step * rng.normal());
  // Saturated proposals sit on the boundary of the support.
  if (!(prop > 0.0 && prop < 1.0)) return false;
  const double log_ratio = q_log_target(prop, st, i, j, iv, prior) -
                           q_log_target(cur, st, i, j, iv, prior) +
                           std::log(prop * (1.0 - prop)) - std::log(cur * (1.0 - cur));
  if (!metropolis(rng, log_ratio)) return false;
  st.q(i, j) = st.q(j, i) = prop;
  return true;
}

void update_sigma2(GgmChainState& st, const SuffStats& stats, Rng& rng, const GgmPrior& prior) {
  const double p = static_cast<double>(st.dim());
  const double tr = trace_omega_v(st, st.decomp.correlation(), stats);
  st.sigma2 = rng.inv_gamma(prior.sigma_shape + 0.5 * stats.n * p, prior.sigma_scale + 0.5 * tr);
}

bool update_s(GgmChainState& st, const SuffStats& stats, Index i, Rng& rng, double step,
              const GgmPrior& prior) {
  return s_step(st, st.decomp.correlation(), stats, i, rng, step, prior);
}

void sweep(GgmChainState& st, const SuffStats& stats, const GgmPrior& prior,
           const SweepOptions& opts, Rng& rng, AcceptanceStats& acc) {
  const Index p = st.dim();
  SymMatrix c = st.decomp.correlation();
  const bool edge_params = opts.update_edges || opts.update_tau || opts.update_q;
  for (Index i = 0; i < p && edge_params; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const DetQuadratic det = det_quadratic(c, i, j);
      PdInterval iv;
      try {
        iv = pd_interval(det, c(i, j));
      } catch (const NoValidInterval& e) {
        throw ChainAborted(-1, "C(" + std::to_string(i) + "," + std::to_string(j) + ")", e.what());
      }
      if (opts.update_edges) {
        acc.edge.record(edge_step(st, c, stats, i, j, det, iv, opts.grid, opts.fix_selection, rng));
      }
      if (opts.update_tau) acc.tau.record(update_tau(st, i, j, iv, rng, opts.steps.tau, prior));
      if (opts.update_q) acc.q.record(update_q(st, i, j, iv, rng, opts.steps.q, prior));
    }
  }
  if (opts.update_s) {
    for (Index i = 0; i < p; ++i) acc.s.record(s_step(st, c, stats, i, rng, opts.steps.s, prior));
  }
  if (opts.update_sigma2) {
    const double tr = trace_omega_v(st, c, stats);
    st.sigma2 = rng.inv_gamma(prior.sigma_shape + 0.5 * stats.n * static_cast<double>(p),
                              prior.sigma_scale + 0.5 * tr);
  }
  check_finite(st);
}

ChainOutput run_chain(const SuffStats& stats, GgmChainState st, const GgmPrior& prior,
                      const McmcConfig& cfg, const SweepOptions& opts) {
  cfg.validate();
  ChainOutput out;
  out.dim = st.dim();
  out.states.reserve(cfg.retained());
  out.adjacency.reserve(cfg.retained());
  Rng rng(cfg.seed);
  for (int it = 0; it < cfg.iterations; ++it) {
    try {
      sweep(st, stats, prior, opts, rng, out.acceptance);
    } catch (const ChainAborted& e) {
      throw ChainAborted(it, e.parameter(), e.reason());
    } catch (const NumericalError& e) {
      throw ChainAborted(it, "sweep", e.what());
    }
    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0) {
      out.states.push_back(st);
      out.adjacency.push_back(graph_key(st.decomp.a));
    }
  }
  return out;
}

ChainOutput run_chain(const DataMatrix& y, const Hyperparameters& hp, const McmcConfig& cfg) {
  if (y.n() == 0 || y.p() < 2) throw std::invalid_argument("run_chain: need p >= 2 and n >= 1");
  if (!y.y.allFinite()) throw std::invalid_argument("run_chain: data contains non-finite values");
  hp.validate(y.p());
  const SuffStats stats = SuffStats::of(y);
  const GgmPrior prior = hp.ggm();
  return run_chain(stats, initial_state(stats, prior), prior, cfg, SweepOptions::from(cfg));
}

SymMatrix effective_precision(const GgmChainState& st) {
  return st.decomp.precision() / st.sigma2;
}

PosteriorSummary summarize(const ChainOutput& chain) {
  const Index p = chain.dim;
  PosteriorSummary out;
  out.mean_precision = SymMatrix::Zero(p, p);
  out.mean_correlation = SymMatrix::Zero(p, p);
  out.edge_marginals = SymMatrix::Zero(p, p);
  if (chain.states.empty()) return out;
  for (const auto& st : chain.states) {
    out.mean_precision += effective_precision(st);
    out.mean_correlation += st.decomp.correlation();
    out.edge_marginals += st.decomp.a.cast<double>();
    out.mean_sigma2 += st.sigma2;
  }
  const double m = static_cast<double>(chain.states.size());
  out.mean_precision /= m;
  out.mean_correlation /= m;
  out.edge_marginals /= m;
  out.edge_marginals.diagonal().setZero();
  out.mean_sigma2 /= m;
  return out;
}

}  // namespace lassoggm
