#include "decaylab/reports.hpp"

#include <cstdio>
#include <fstream>

#include "decaylab/version.hpp"

namespace decaylab {

using nlohmann::json;

std::string config_hash(const json& doc) {
    const std::string s = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json versions() {
    return json{{"decaylab", project_version},
                {"spectral_core", "1"},
                {"models", "1"},
                {"integrator", "1"},
                {"quotients", "1"},
                {"classifier", "1"},
                {"slow_certifier", "1"},
                {"fast_constructor", "1"},
                {"cli_io", "1"}};
}

json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json vec(const StateVector& u) {
    json a = json::array();
    for (double v : u.c) a.push_back(v);
    return a;
}

const char* term_name(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowup: return "blowup";
        case Termination::left_ball: return "left_ball";
    }
    return "?";
}

} // namespace

json report_meta(const ExperimentConfig& cfg, const ProblemDefinition& prob) {
    return json{{"config_hash", config_hash(cfg.doc)},
                {"seed", cfg.seed},
                {"model", prob.name},
                {"constants_provenance",
                 prob.bounds.provenance == Provenance::sampled ? "sampled" : "formula"},
                {"constants_sample_seed", prob.bounds.sample_seed},
                {"versions", versions()}};
}

json to_json(const ClassificationReport& rep) {
    json fit = [](const RateFit& f) {
        return json{{"t_lo", f.t_lo},       {"t_hi", f.t_hi},   {"n", f.n},
                    {"slope", finite_or_null(f.slope)}, {"drift", finite_or_null(f.drift)},
                    {"residual", finite_or_null(f.residual)},   {"stable", f.stable}};
    }(rep.power_fit);
    json j{{"verdict", to_string(rep.verdict)},
           {"p_hat", finite_or_null(rep.p_hat)},
           {"lambda_hat", finite_or_null(rep.lambda_hat)},
           {"lambda_snapped", finite_or_null(rep.lambda_snapped)},
           {"v0_hat", vec(rep.v0_hat)},
           {"gamma_window", json::array({finite_or_null(rep.gamma_lower),
                                         finite_or_null(rep.gamma_upper)})},
           {"evidence",
            json{{"power_fit", fit},
                 {"exp_fit",
                  json{{"t_lo", rep.exp_fit.t_lo},
                       {"t_hi", rep.exp_fit.t_hi},
                       {"n", rep.exp_fit.n},
                       {"slope", finite_or_null(rep.exp_fit.slope)},
                       {"drift", finite_or_null(rep.exp_fit.drift)},
                       {"residual", finite_or_null(rep.exp_fit.residual)},
                       {"stable", rep.exp_fit.stable}}},
                 {"stationary", rep.stationary},
                 {"note", rep.note}}}};
    if (rep.profile) j["profile"] = to_json(*rep.profile);
    return j;
}

json to_json(const ProfileReport& p) {
    return json{{"v0_hat", vec(p.v0_hat)},
                {"lambda", p.lambda},
                {"eta", p.eta},
                {"gamma_low", p.gamma_low},
                {"gamma_high", p.gamma_high},
                {"low_log_change", p.low_log_change},
                {"high_log_change", p.high_log_change},
                {"remainder_at_roundoff", p.remainder_at_roundoff},
                {"pass", p.pass}};
}

json to_json(const SlowVerification& v) {
    return json{{"M1_hat", finite_or_null(v.M1_hat)}, {"M2_hat", finite_or_null(v.M2_hat)},
                {"m1_drift", v.m1_drift},             {"m2_drift", v.m2_drift},
                {"stationary", v.stationary},          {"pass", v.pass}};
}

json to_json(const QuotientCheckReport& rep) {
    return json{{"d", rep.d},
                {"max_margin", rep.max_margin},
                {"argmax_t", rep.argmax_t},
                {"tolerance", rep.tolerance},
                {"pass", rep.pass},
                {"checked_samples", rep.checked_samples},
                {"skipped_samples", rep.skipped_samples}};
}

json to_json(const SlowCertificate& cert) {
    return json{{"K1", cert.K1},
                {"sigma0", cert.sigma0},
                {"R", cert.R},
                {"nu", cert.nu},
                {"K0", cert.K0},
                {"p", cert.p},
                {"q", cert.q},
                {"slack1", cert.slack1},
                {"slack2", cert.slack2},
                {"constants_provenance",
                 cert.constants_provenance == Provenance::sampled ? "sampled" : "formula"},
                {"sample_seed", cert.sample_seed}};
}

json to_json(const Membership& m) {
    return json{{"member", m.member},
                {"slacks",
                 json{{"nonzero", m.slack_nonzero},
                      {"sigma", m.slack_sigma},
                      {"quotient", m.slack_quotient}}}};
}

json to_json(const MonitorReport& rep) {
    return json{{"norm_monotone", rep.norm_monotone},
                {"quotient_below_K1", rep.quotient_below_K1},
                {"M1_positive", rep.M1_positive},
                {"M1_hat", finite_or_null(rep.M1_hat)},
                {"m1_drift", rep.m1_drift},
                {"first_violation_t", rep.first_violation_t},
                {"terminated", term_name(rep.terminated)},
                {"pass", rep.pass}};
}

json to_json(const FixedPointSolution& sol) {
    return json{{"u0", vec(sol.u0)},
                {"w1", vec(sol.w1)},
                {"v0", vec(sol.v0)},
                {"w0", vec(sol.w0)},
                {"residual", sol.residual},
                {"iterations", sol.iterations},
                {"distances", sol.distances},
                {"contraction_ratios", sol.contraction_ratios},
                {"params",
                 json{{"lambda", sol.params.lambda},
                      {"beta", std::isinf(sol.params.beta) ? json(nullptr)
                                                           : json(sol.params.beta)},
                      {"delta", sol.params.delta},
                      {"r0", sol.params.r0},
                      {"r1", sol.params.r1},
                      {"T", sol.params.T},
                      {"grid_points", sol.params.grid.size()},
                      {"slack1", sol.params.slack1},
                      {"slack2", sol.params.slack2}}}};
}

json to_json(const ValidationReport& rep) {
    return json{{"profile_window_err", rep.profile_window_err},
                {"profile_argmax_t", rep.profile_argmax_t},
                {"grid_match_err", rep.grid_match_err},
                {"grid_argmax_t", rep.grid_argmax_t},
                {"window", json::array({rep.window_lo, rep.window_hi})},
                {"profile_tol", rep.profile_tol},
                {"grid_tol", rep.grid_tol},
                {"terminated", term_name(rep.terminated)},
                {"pass", rep.pass}};
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << "\n";
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw std::runtime_error("cannot write " + path);
    std::fprintf(f, "t,norm_H,norm_Ahalf,Q,Q_2p");
    const std::size_t n_modes = traj.has_states() ? traj.states.front().size() : 0;
    for (std::size_t j = 0; j < n_modes; ++j) std::fprintf(f, ",c_%zu", j);
    std::fprintf(f, "\n");
    for (std::size_t i = 0; i < traj.samples(); ++i) {
        std::fprintf(f, "%.16e,%.16e,%.16e,%.16e,%.16e", traj.times[i], traj.norm_H[i],
                     traj.norm_Ahalf[i], traj.Q[i], traj.Q2p[i]);
        for (std::size_t j = 0; j < n_modes; ++j)
            std::fprintf(f, ",%.16e", traj.states[i][j]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

} // namespace decaylab
