#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "decaylab/integrator.hpp"
#include "decaylab/slow_certifier.hpp"

namespace decaylab {

// Raised for malformed configuration; carries the offending key path.
// The CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A single JSON document drives an experiment. Unknown keys are errors,
// not warnings: a silent typo in a tolerance key would invalidate a run.
struct ExperimentConfig {
    nlohmann::json doc;
    std::uint64_t seed = 0;
    bool store_states = false;
    std::vector<std::string> analyses;
    IntegratorConfig integrator;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// model = ode2_slow | ode2_fast | neumann_interval | dirichlet_interval |
// custom, with per-model parameter keys (lambda, beta, p, q, c, modes,
// critical; custom takes eigenvalues/multiplicities/nonlinearity/bounds).
ProblemDefinition build_model(const nlohmann::json& model, std::uint64_t seed);

// Exactly one initial-data source: {"coefficients": [...]} or a preset
// ("kernel_constant", "mode", "certified_sample"). certified_sample draws
// seeded data inside the certified set with margins wide enough for the
// openness probes; pass the certificate for it.
StateVector build_initial(const nlohmann::json& initial, const ProblemDefinition& prob,
                          std::uint64_t seed, const SlowCertificate* cert);

} // namespace decaylab
