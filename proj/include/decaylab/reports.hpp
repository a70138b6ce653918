#pragma once

#include <string>

#include <json.hpp>

#include "decaylab/classifier.hpp"
#include "decaylab/config.hpp"
#include "decaylab/fast_constructor.hpp"
#include "decaylab/quotients.hpp"
#include "decaylab/slow_certifier.hpp"

namespace decaylab {

// FNV-1a over the serialized document; embedded in every report so
// artifacts can be traced to the exact configuration that produced them.
std::string config_hash(const nlohmann::json& doc);

nlohmann::json report_meta(const ExperimentConfig& cfg, const ProblemDefinition& prob);

nlohmann::json to_json(const ClassificationReport& rep);
nlohmann::json to_json(const ProfileReport& p);
nlohmann::json to_json(const SlowVerification& v);
nlohmann::json to_json(const QuotientCheckReport& rep);
nlohmann::json to_json(const SlowCertificate& cert);
nlohmann::json to_json(const Membership& m);
nlohmann::json to_json(const MonitorReport& rep);
nlohmann::json to_json(const FixedPointSolution& sol);
nlohmann::json to_json(const ValidationReport& rep);

void write_json(const std::string& path, const nlohmann::json& doc);

// Columns: t, norm_H, norm_Ahalf, Q, Q_2p, then c_0..c_{N-1} when states
// are stored. Floats in fixed 17-significant-digit scientific notation.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

} // namespace decaylab
