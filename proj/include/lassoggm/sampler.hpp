#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lassoggm/model.hpp"
#include "lassoggm/random.hpp"

namespace lassoggm {

/// Random-walk scales: log-normal for tau and S, logit-normal for q.
struct ProposalSteps {
  double tau = 0.25;
  double q = 0.5;
  double s = 0.1;
};

struct McmcConfig {
  int iterations = 20000;
  int burn_in = 4000;
  int thin = 4;
  std::uint64_t seed = 1;
  int grid_points = 100;
  ProposalSteps steps;

  /// Throws std::invalid_argument.
  void validate() const;
  std::size_t retained() const noexcept {
    return static_cast<std::size_t>((iterations - burn_in) / thin);
  }
};

/// Parameter families touched by one sweep. Turning families off gives the
/// prior studies (fixed selection, fixed scales) and the mixture models,
/// which have no sigma^2.
struct SweepOptions {
  GridSpec grid;
  ProposalSteps steps;
  bool update_edges = true;
  /// Hold every A_ij at its current value and redraw only R_ij.
  bool fix_selection = false;
  bool update_tau = true;
  bool update_q = true;
  bool update_s = true;
  bool update_sigma2 = true;

  static SweepOptions from(const McmcConfig& cfg);
};

struct MoveCounter {
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;

  void record(bool ok) noexcept {
    ++proposed;
    accepted += ok ? 1 : 0;
  }
  double rate() const noexcept {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

struct AcceptanceStats {
  MoveCounter edge;
  MoveCounter tau;
  MoveCounter q;
  MoveCounter s;

  void merge(const AcceptanceStats& other) noexcept;
};

class ChainAborted : public NumericalError {
 public:
  ChainAborted(long iteration, std::string parameter, const std::string& reason);

  long iteration() const noexcept { return iteration_; }
  const std::string& parameter() const noexcept { return parameter_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  long iteration_;
  std::string parameter_;
  std::string reason_;
};

struct ChainOutput {
  Index dim = 0;
  std::vector<GgmChainState> states;
  /// Canonical upper-triangle key of A for every retained state.
  std::vector<std::string> adjacency;
  AcceptanceStats acceptance;
};

/// Data-informed starting point: C = (P + I)/2 where P is the unit-diagonal
/// rescaling of the inverse sample covariance (identity when that is not
/// available), A_ij = 1 iff |C_ij| > 1e-3, S_i = 1/sd_i clamped to
/// [1e-3, 1e3], tau at its prior mode, q at its prior mean, sigma^2 = 1.
GgmChainState initial_state(const SuffStats& stats, const GgmPrior& prior);
GgmChainState initial_state(const DataMatrix& y, const GgmPrior& prior);

/// Joint griddy-Gibbs draw of (A_ij, R_ij). Returns false and leaves the
/// state untouched when the table is empty or the result fails the PD check.
bool update_edge(GgmChainState& state, const SuffStats& stats, Index i, Index j, Rng& rng,
                 const GridSpec& grid = {}, bool fix_selection = false);

bool update_tau(GgmChainState& state, Index i, Index j, const PdInterval& interval, Rng& rng,
                double step, const GgmPrior& prior);
bool update_q(GgmChainState& state, Index i, Index j, const PdInterval& interval, Rng& rng,
              double step, const GgmPrior& prior);

/// Exact draw from IG(k + np/2, l + tr(Omega V)/2).
void update_sigma2(GgmChainState& state, const SuffStats& stats, Rng& rng, const GgmPrior& prior);

bool update_s(GgmChainState& state, const SuffStats& stats, Index i, Rng& rng, double step,
              const GgmPrior& prior);

/// Log full conditionals, up to additive constants, on the natural scale.
double tau_log_target(double tau, const GgmChainState& state, Index i, Index j,
                      const PdInterval& interval, const GgmPrior& prior);
double q_log_target(double q, const GgmChainState& state, Index i, Index j,
                    const PdInterval& interval, const GgmPrior& prior);
double s_log_target(double s, const GgmChainState& state, const SuffStats& stats, Index i,
                    const GgmPrior& prior);

/// min(1, exp(log_ratio)), with NaN treated as rejection.
double mh_accept_probability(double log_ratio) noexcept;

/// One systematic scan: every edge i < j in row-major order (interval, edge,
/// tau, q), then every S_i, then sigma^2.
void sweep(GgmChainState& state, const SuffStats& stats, const GgmPrior& prior,
           const SweepOptions& opts, Rng& rng, AcceptanceStats& acc);

/// Full single-group chain on y as given (the likelihood is zero-mean).
ChainOutput run_chain(const DataMatrix& y, const Hyperparameters& hp, const McmcConfig& cfg);

/// General driver from an explicit start; stats may be empty for prior-only runs.
ChainOutput run_chain(const SuffStats& stats, GgmChainState start, const GgmPrior& prior,
                      const McmcConfig& cfg, const SweepOptions& opts);

/// Omega / sigma^2, the precision of a single sample.
SymMatrix effective_precision(const GgmChainState& state);

struct PosteriorSummary {
  SymMatrix mean_precision;    // posterior mean of Omega / sigma^2
  SymMatrix mean_correlation;  // posterior mean of A o R
  SymMatrix edge_marginals;
  double mean_sigma2 = 0.0;
};

PosteriorSummary summarize(const ChainOutput& chain);

}  // namespace lassoggm
