#pragma once

#include <string>
#include <vector>

#include "decaylab/config.hpp"

namespace decaylab {

struct RunOutcome {
    int exit_code = 0;   // 0 pass, 1 assertion failure (2 = config error, via ConfigError)
    bool all_pass = true;
    std::vector<std::string> artifacts;
};

// Executes the configured pipeline: integrate, write the trajectory CSV,
// then each requested analysis with its JSON report.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// One run per grid point of cfg.doc["sweep"], plus an index manifest.
// Refuses grids larger than the configured budget.
RunOutcome run_sweep(const ExperimentConfig& cfg, const std::string& out_dir);

} // namespace decaylab
