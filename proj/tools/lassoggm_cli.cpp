#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "lassoggm/commands.hpp"

using lassoggm::cli::Overrides;

namespace {

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--iterations", o.iterations, "MCMC iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--burn-in", o.burn_in, "iterations discarded as burn-in")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--thin", o.thin, "keep every thin-th draw")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--top-k", o.top_k, "number of top graphs")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", o.threshold, "partial correlation threshold")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian sparse Gaussian graphical models with lasso selection priors"};
  app.require_subcommand(1);
  Overrides o;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "generate a precision matrix and Gaussian samples"},
      {"fit", "single-group graphical model chain"},
      {"fit-mixture", "finite mixture chains with BIC selection of K"},
      {"fit-dp", "Dirichlet process mixture chain"},
      {"evaluate", "score estimates against a true precision matrix"},
      {"predict", "held-out prediction by averaging over top graphs"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lassoggm::cli::kConfigError;
  }
  if (o.iterations && o.burn_in && *o.burn_in >= *o.iterations) {
    std::cerr << "--burn-in must be smaller than --iterations\n";
    return lassoggm::cli::kConfigError;
  }
  return lassoggm::cli::run(app.get_subcommands().front()->get_name(), o);
}
