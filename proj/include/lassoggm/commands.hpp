#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace lassoggm::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalAbort = 3, kIoError = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line flags. Set values take precedence over the config file.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<int> burn_in;
  std::optional<int> thin;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  std::optional<int> top_k;
  std::optional<double> threshold;
};

/// Runs one subcommand and maps failures to exit codes.
int run(const std::string& command, const Overrides& flags);

/// Reads GGM_LOG_LEVEL and configures the default logger.
/// Throws ConfigError on an unknown level.
void configure_logging();

void cmd_simulate(const Overrides& flags);
void cmd_fit(const Overrides& flags);
void cmd_fit_mixture(const Overrides& flags);
void cmd_fit_dp(const Overrides& flags);
void cmd_evaluate(const Overrides& flags);
void cmd_predict(const Overrides& flags);

}  // namespace lassoggm::cli
