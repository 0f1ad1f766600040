#include "lassoggm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "lassoggm/graph.hpp"

namespace lassoggm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Partition nearest_mean(const Matrix& y, const std::vector<Vector>& means) {
  Partition z(static_cast<std::size_t>(y.cols()), 0);
  for (Index i = 0; i < y.cols(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < means.size(); ++j) {
      const double d = (y.col(i) - means[j]).squaredNorm();
      if (d < best) {
        best = d;
        z[static_cast<std::size_t>(i)] = static_cast<int>(j);
      }
    }
  }
  return z;
}

// Permutation perm[draw label] = reference label maximizing agreement.
std::vector<int> align_labels(const Partition& draw, const Partition& ref, int k) {
  Matrix overlap = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < draw.size(); ++i) overlap(draw[i], ref[i]) += 1.0;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  if (k <= 8) {
    std::vector<int> best = perm;
    double best_score = -1.0;
    do {
      double score = 0.0;
      for (int a = 0; a < k; ++a) score += overlap(a, perm[static_cast<std::size_t>(a)]);
      if (score > best_score) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // Greedy on the largest remaining overlap.
  std::vector<bool> used_a(static_cast<std::size_t>(k), false);
  std::vector<bool> used_c(static_cast<std::size_t>(k), false);
  for (int step = 0; step < k; ++step) {
    double best = -1.0;
    int ba = 0;
    int bc = 0;
    for (int a = 0; a < k; ++a) {
      for (int c = 0; c < k; ++c) {
        if (used_a[static_cast<std::size_t>(a)] || used_c[static_cast<std::size_t>(c)]) continue;
        if (overlap(a, c) > best) {
          best = overlap(a, c);
          ba = a;
          bc = c;
        }
      }
    }
    used_a[static_cast<std::size_t>(ba)] = used_c[static_cast<std::size_t>(bc)] = true;
    perm[static_cast<std::size_t>(ba)] = bc;
  }
  return perm;
}

struct RetainedDraw {
  Partition labels;
  Vector weights;
  std::vector<Vector> means;
  std::vector<GgmChainState> components;
};

}  // namespace

Partition kmeans(const Matrix& points, int k, Rng& rng, int iterations) {
  const Index n = points.cols();
  if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
  if (n == 0) return {};
  std::vector<Vector> centers;
  centers.push_back(points.col(static_cast<Index>(rng.index(static_cast<std::size_t>(n)))));
  while (static_cast<int>(centers.size()) < k) {
    std::vector<double> lw(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) d = std::min(d, (points.col(i) - c).squaredNorm());
      lw[static_cast<std::size_t>(i)] = d > 0.0 ? std::log(d) : kNegInf;
    }
    std::size_t pick = 0;
    try {
      pick = sample_log_weights(rng, lw);
    } catch (const EmptyTable&) {
      pick = rng.index(static_cast<std::size_t>(n));
    }
    centers.push_back(points.col(static_cast<Index>(pick)));
  }
  Partition z = nearest_mean(points, centers);
  for (int it = 0; it < iterations; ++it) {
    for (int j = 0; j < k; ++j) {
      Vector sum = Vector::Zero(points.rows());
      int count = 0;
      for (Index i = 0; i < n; ++i) {
        if (z[static_cast<std::size_t>(i)] == j) {
          sum += points.col(i);
          ++count;
        }
      }
      if (count > 0) centers[static_cast<std::size_t>(j)] = sum / count;
    }
    Partition next = nearest_mean(points, centers);
    if (next == z) break;
    z = std::move(next);
  }
  return z;
}

Vector log_normal_density(const Matrix& y, const Vector& theta, const SymMatrix& omega) {
  Eigen::LLT<Matrix> llt(omega);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("log_normal_density: precision is not positive definite");
  }
  const Matrix l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const Matrix z = l.transpose() * (y.colwise() - theta);
  const double p = static_cast<double>(y.rows());
  const double c = -0.5 * p * std::log(2.0 * std::numbers::pi) + 0.5 * log_det;
  return (c - 0.5 * z.colwise().squaredNorm().array()).matrix().transpose();
}

std::vector<Index> members(const Partition& labels, int cluster) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cluster) out.push_back(static_cast<Index>(i));
  }
  return out;
}

void update_weights(MixtureState& st, const Vector& alpha, Rng& rng) {
  Vector a = alpha;
  for (int l : st.labels) a(l) += 1.0;
  st.weights = dirichlet(rng, a);
}

void update_labels(MixtureState& st, const DataMatrix& y, Rng& rng) {
  const Index n = y.n();
  Matrix lw(st.k, n);
  for (int j = 0; j < st.k; ++j) {
    const SymMatrix omega = st.components[static_cast<std::size_t>(j)].decomp.precision();
    const double log_w = std::log(st.weights(j));
    lw.row(j) = (log_normal_density(y.y, st.means[static_cast<std::size_t>(j)], omega).array() + log_w)
                    .matrix()
                    .transpose();
  }
  std::vector<double> col(static_cast<std::size_t>(st.k));
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < st.k; ++j) col[static_cast<std::size_t>(j)] = lw(j, i);
    try {
      st.labels[static_cast<std::size_t>(i)] = static_cast<int>(sample_log_weights(rng, col));
    } catch (const EmptyTable&) {
      const Partition z = nearest_mean(y.y.col(i), st.means);
      st.labels[static_cast<std::size_t>(i)] = z.front();
      spdlog::warn("mixture: sample {} has zero density under every component; using nearest mean",
                   i);
    }
  }
}

void update_means(MixtureState& st, const DataMatrix& y, Rng& rng) {
  const SymMatrix b_inv = inverse_pd(st.b);
  for (int j = 0; j < st.k; ++j) {
    const auto idx = members(st.labels, j);
    Vector sum = Vector::Zero(y.p());
    for (Index i : idx) sum += y.y.col(i);
    const SymMatrix omega = st.components[static_cast<std::size_t>(j)].decomp.precision();
    const SymMatrix prec = symmetrize(static_cast<double>(idx.size()) * omega + b_inv);
    const Vector mean = Eigen::LLT<Matrix>(prec).solve(omega * sum);
    st.means[static_cast<std::size_t>(j)] = mvn_from_precision(rng, mean, prec);
  }
}

void update_b(MixtureState& st, double nu0, const SymMatrix& b0, Rng& rng) {
  SymMatrix scale = b0;
  for (const auto& th : st.means) scale += th * th.transpose();
  st.b = inverse_wishart(rng, nu0 + static_cast<double>(st.k), symmetrize(scale));
}

void update_components(MixtureState& st, const DataMatrix& y, const GgmPrior& prior,
                       const SweepOptions& opts, Rng& rng, AcceptanceStats& acc) {
  for (int j = 0; j < st.k; ++j) {
    const auto idx = members(st.labels, j);
    const SuffStats stats = idx.empty() ? SuffStats::empty(y.p())
                                        : SuffStats::of(y.columns(idx), st.means[static_cast<std::size_t>(j)]);
    sweep(st.components[static_cast<std::size_t>(j)], stats, prior, opts, rng, acc);
  }
}

double mixture_log_likelihood(const DataMatrix& y, const MixturePointEstimate& est) {
  const int k = static_cast<int>(est.means.size());
  Matrix lw(k, y.n());
  for (int j = 0; j < k; ++j) {
    lw.row(j) = (log_normal_density(y.y, est.means[static_cast<std::size_t>(j)],
                                    est.precisions[static_cast<std::size_t>(j)])
                     .array() +
                 std::log(est.weights(j)))
                    .matrix()
                    .transpose();
  }
  double total = 0.0;
  std::vector<double> col(static_cast<std::size_t>(k));
  for (Index i = 0; i < y.n(); ++i) {
    for (int j = 0; j < k; ++j) col[static_cast<std::size_t>(j)] = lw(j, i);
    total += log_sum_exp(col);
  }
  return total;
}

long parameter_count(const MixturePointEstimate& est) {
  long m = 0;
  for (const auto& a : est.graphs) {
    const Index p = a.rows();
    m += static_cast<long>((a.sum() - p) / 2) + 2 * static_cast<long>(p);
  }
  return m + static_cast<long>(est.means.size()) - 1;
}

double bic(const DataMatrix& y, const MixturePointEstimate& est) {
  return -2.0 * mixture_log_likelihood(y, est) +
         static_cast<double>(parameter_count(est)) * std::log(static_cast<double>(y.n()));
}

MixtureFit run_mixture_chain(const DataMatrix& data, const Hyperparameters& hp, int k,
                             const McmcConfig& cfg) {
  cfg.validate();
  if (k < 1) throw std::invalid_argument("mixture: K must be positive");
  if (data.n() < 1 || data.p() < 2) throw std::invalid_argument("mixture: need p >= 2 and n >= 1");
  const Index p = data.p();
  hp.validate(p);
  const Vector alpha = hp.mixture_alpha(k);
  const double nu0 = hp.mixture_nu0(p);
  const SymMatrix b0 = hp.mixture_b0(p);
  const GgmPrior prior = hp.ggm();
  SweepOptions opts = SweepOptions::from(cfg);
  opts.update_sigma2 = false;

  MixtureFit fit;
  fit.k = k;
  fit.center = data.mean();
  const DataMatrix y = data.centered();
  Rng rng = Rng(cfg.seed).substream(static_cast<std::uint64_t>(k));

  MixtureState st;
  st.k = k;
  st.labels = kmeans(y.y, k, rng);
  st.b = b0;
  st.weights = Vector(k);
  for (int j = 0; j < k; ++j) {
    const auto idx = members(st.labels, j);
    st.weights(j) = (static_cast<double>(idx.size()) + alpha(j)) /
                    (static_cast<double>(y.n()) + alpha.sum());
    const DataMatrix sub = y.columns(idx);
    st.means.push_back(sub.mean());
    const SuffStats stats = idx.empty() ? SuffStats::empty(p) : SuffStats::of(sub, sub.mean());
    st.components.push_back(initial_state(stats, prior));
  }

  std::vector<RetainedDraw> draws;
  draws.reserve(cfg.retained());
  for (int it = 0; it < cfg.iterations; ++it) {
    try {
      update_weights(st, alpha, rng);
      update_labels(st, y, rng);
      update_means(st, y, rng);
      update_b(st, nu0, b0, rng);
      update_components(st, y, prior, opts, rng, fit.acceptance);
    } catch (const ChainAborted& e) {
      throw ChainAborted(it, e.parameter(), e.reason());
    } catch (const NumericalError& e) {
      throw ChainAborted(it, "mixture", e.what());
    }
    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0) {
      draws.push_back(RetainedDraw{st.labels, st.weights, st.means, st.components});
      fit.label_draws.push_back(st.labels);
    }
  }

  fit.co_clustering = co_clustering(fit.label_draws);
  fit.point_partition = binder_point_partition(fit.label_draws, fit.co_clustering);

  auto& est = fit.estimate;
  est.weights = Vector::Zero(k);
  est.means.assign(static_cast<std::size_t>(k), Vector::Zero(p));
  est.precisions.assign(static_cast<std::size_t>(k), SymMatrix::Zero(p, p));
  fit.edge_marginals.assign(static_cast<std::size_t>(k), SymMatrix::Zero(p, p));
  fit.mean_correlations.assign(static_cast<std::size_t>(k), SymMatrix::Zero(p, p));
  for (const auto& d : draws) {
    const auto perm = align_labels(d.labels, fit.point_partition, k);
    for (int a = 0; a < k; ++a) {
      const auto c = static_cast<std::size_t>(perm[static_cast<std::size_t>(a)]);
      const auto& comp = d.components[static_cast<std::size_t>(a)];
      est.weights(static_cast<Index>(c)) += d.weights(a);
      est.means[c] += d.means[static_cast<std::size_t>(a)];
      est.precisions[c] += comp.decomp.precision();
      fit.edge_marginals[c] += comp.decomp.a.cast<double>();
      fit.mean_correlations[c] += comp.decomp.correlation();
    }
  }
  const double m = static_cast<double>(draws.size());
  est.weights /= m;
  est.weights /= est.weights.sum();
  for (int j = 0; j < k; ++j) {
    const auto c = static_cast<std::size_t>(j);
    est.means[c] = est.means[c] / m + fit.center;
    est.precisions[c] /= m;
    fit.edge_marginals[c] /= m;
    fit.edge_marginals[c].diagonal().setZero();
    fit.mean_correlations[c] /= m;
    est.graphs.push_back(median_probability_graph(fit.edge_marginals[c]));
  }
  fit.log_likelihood = mixture_log_likelihood(data, est);
  fit.parameters = parameter_count(est);
  fit.bic = -2.0 * fit.log_likelihood +
            static_cast<double>(fit.parameters) * std::log(static_cast<double>(data.n()));
  return fit;
}

KSelection select_k(const DataMatrix& y, const Hyperparameters& hp, const McmcConfig& cfg,
                    const std::vector<int>& k_range, int threads) {
  if (k_range.empty()) throw std::invalid_argument("select_k: empty K range");
  KSelection out;
  out.ks = k_range;
  std::sort(out.ks.begin(), out.ks.end());
  out.ks.erase(std::unique(out.ks.begin(), out.ks.end()), out.ks.end());
  out.fits.resize(out.ks.size());
  out.errors.resize(out.ks.size());

  auto run_one = [&](std::size_t idx) {
    try {
      out.fits[idx] = run_mixture_chain(y, hp, out.ks[idx], cfg);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      out.errors[idx] = e.what();
      spdlog::warn("mixture: K={} failed: {}", out.ks[idx], e.what());
    }
  };
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < out.ks.size(); start += workers) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = start; i < std::min(out.ks.size(), start + workers); ++i) {
      jobs.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, run_one, i));
    }
    for (auto& j : jobs) j.get();
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.ks.size(); ++i) {
    if (out.fits[i] && out.fits[i]->bic < best) {
      best = out.fits[i]->bic;
      out.best_k = out.ks[i];
    }
  }
  if (out.best_k == 0) throw NumericalError("select_k: every K failed");
  return out;
}

}  // namespace lassoggm
