#pragma once

// Experiment commands behind the CLI. Each writes report.json (and, where a
// trajectory is produced, CSV, metadata and plot files) into the run's output
// directory; wall time goes to timing.json so reports stay byte-identical.

#include <filesystem>
#include <nlohmann/json.hpp>

#include "cal/config.hpp"

namespace cal {

inline constexpr int kReportSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

struct RunOutcome {
  nlohmann::ordered_json report;
  int exit_code = kExitOk;
};

RunOutcome cmd_analyze(const ExperimentConfig& config);
RunOutcome cmd_simulate(const ExperimentConfig& config);
RunOutcome cmd_compare_gradient_flow(const ExperimentConfig& config);
RunOutcome cmd_action_oracle(const ExperimentConfig& config);
RunOutcome cmd_reset_experiment(const ExperimentConfig& config);

/// Dispatches on config.run.kind, writes report.json and timing.json.
/// Library errors propagate; see exit_code_for.
RunOutcome run_experiment(const ExperimentConfig& config);

/// kExitNumerical for NonFinite, SingularSystem and ConfluentRoots,
/// kExitConfig for every other error.
int exit_code_for(const std::exception& e);

}  // namespace cal
