#include "decaylab/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include "decaylab/reports.hpp"

namespace decaylab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool has_analysis(const ExperimentConfig& cfg, const char* name) {
    return std::find(cfg.analyses.begin(), cfg.analyses.end(), name) != cfg.analyses.end();
}

json classification_block(const ExperimentConfig& cfg, const ProblemDefinition& prob,
                          const Trajectory& traj, bool& pass) {
    json j;
    try {
        const ClassificationReport rep = classify(traj, prob);
        j = to_json(rep);
        if (rep.verdict == Verdict::slow && !rep.stationary)
            j["slow_verification"] = to_json(verify_slow_conclusions(traj, rep, prob));
        if (cfg.doc.contains("classify") && cfg.doc["classify"].contains("expect_verdict")) {
            const std::string want =
                cfg.doc["classify"]["expect_verdict"].get<std::string>();
            const bool ok = want == to_string(rep.verdict);
            j["expected_verdict"] = want;
            j["expectation_met"] = ok;
            if (!ok) pass = false;
        }
    } catch (const std::exception& e) {
        j["error"] = e.what();
        pass = false;
    }
    return j;
}

json quotient_block(const ExperimentConfig& cfg, const ProblemDefinition& prob,
                    const Trajectory& traj, bool& pass) {
    std::vector<double> ds{0.0, 2.0 * prob.bounds.p};
    if (cfg.doc.contains("quotients") && cfg.doc["quotients"].contains("d_values"))
        ds = cfg.doc["quotients"]["d_values"].get<std::vector<double>>();
    json checks = json::array();
    bool all = true;
    for (double d : ds) {
        try {
            const QuotientCheckReport rep = check_quotient_inequalities(traj, prob, d);
            checks.push_back(to_json(rep));
            all = all && rep.pass;
        } catch (const std::exception& e) {
            checks.push_back(json{{"d", d}, {"error", e.what()}});
            all = false;
        }
    }
    if (!all) pass = false;
    return json{{"checks", checks}, {"pass", all}};
}

json certify_block(const ExperimentConfig& cfg, const ProblemDefinition& prob,
                   const StateVector& u0, const std::optional<SlowCertificate>& cert,
                   bool& pass) {
    json j;
    if (!cert) {
        j["error"] = "certificate unavailable";
        pass = false;
        return j;
    }
    j["certificate"] = to_json(*cert);
    const Membership mem = certify(prob.spectrum, u0, *cert);
    j["membership"] = to_json(mem);
    if (!mem.member) {
        pass = false;
        return j;
    }
    IntegratorConfig mc = cfg.integrator;
    mc.store_states = false;
    mc.t_end = 1e4;
    mc.diag_stride = std::max<std::size_t>(mc.diag_stride, 1);
    if (cfg.doc.contains("certify_slow")) {
        const json& cs = cfg.doc["certify_slow"];
        if (cs.contains("monitor_t_end")) mc.t_end = cs["monitor_t_end"].get<double>();
        if (cs.contains("monitor_dt")) mc.dt = cs["monitor_dt"].get<double>();
    }
    try {
        const MonitorReport mon = monitor_certified_run(prob, u0, *cert, mc);
        j["monitor"] = to_json(mon);
        j["M1_hat"] = mon.M1_hat;
        if (!mon.pass) pass = false;
    } catch (const std::exception& e) {
        j["monitor"] = json{{"error", e.what()}};
        pass = false;
    }
    return j;
}

json construct_block(const ExperimentConfig& cfg, const ProblemDefinition& prob, bool& pass) {
    json j;
    const json& opts = cfg.doc.at("construct_fast");
    try {
        const auto block = opts.at("lambda_index").get<std::size_t>();
        const double r0 = opts.contains("r0") ? opts["r0"].get<double>() : 0.1;
        const FastParams params = choose_params(prob, block, r0);
        const auto& spec = prob.spectrum;

        StateVector v0(spec.total_dim), w0(spec.total_dim);
        if (opts.contains("v0")) {
            const auto c = opts["v0"].get<std::vector<double>>();
            if (c.size() != spec.total_dim)
                throw ConfigError("construct_fast.v0: wrong length");
            v0 = StateVector(c);
        }
        if (opts.contains("w0")) {
            const auto c = opts["w0"].get<std::vector<double>>();
            if (c.size() != spec.total_dim)
                throw ConfigError("construct_fast.w0: wrong length");
            w0 = StateVector(c);
        }
        const std::size_t lam_first = spec.block_begin[block];
        if (opts.contains("v0_amplitude")) v0[lam_first] = opts["v0_amplitude"].get<double>();
        if (opts.contains("w0_amplitude")) {
            std::size_t wb = block + 1;
            if (opts.contains("w0_block")) wb = opts["w0_block"].get<std::size_t>();
            if (wb <= block || wb >= spec.blocks())
                throw ConfigError("construct_fast.w0_block: must lie above lambda");
            w0[spec.block_begin[wb]] = opts["w0_amplitude"].get<double>();
        }
        if (!opts.contains("v0") && !opts.contains("v0_amplitude")) {
            // split the admissible mass between the profile and the upper datum
            const double unit_v = std::sqrt(1.0 + params.lambda);
            v0[lam_first] = 0.45 * params.r0 / unit_v;
            if (block + 1 < spec.blocks() && !opts.contains("w0") &&
                !opts.contains("w0_amplitude")) {
                const double mu = spec.eigenvalues[block + 1];
                w0[spec.block_begin[block + 1]] = 0.45 * params.r0 / std::sqrt(1.0 + mu);
            }
        }

        const FixedPointSolution sol = solve_fixed_point(prob, params, v0, w0);
        j = to_json(sol);
        const bool do_validate = !opts.contains("validate") || opts["validate"].get<bool>();
        if (do_validate) {
            double wlo = -1.0, whi = -1.0;
            if (opts.contains("window")) {
                wlo = opts["window"].at(0).get<double>();
                whi = opts["window"].at(1).get<double>();
            }
            const double ptol =
                opts.contains("profile_tol") ? opts["profile_tol"].get<double>() : 1e-4;
            const double gtol =
                opts.contains("grid_tol") ? opts["grid_tol"].get<double>() : 1e-5;
            const ValidationReport val =
                validate_solution(sol, prob, cfg.integrator, wlo, whi, ptol, gtol);
            j["validation"] = to_json(val);
            if (!val.pass) pass = false;
        }
    } catch (const std::exception& e) {
        j["error"] = e.what();
        pass = false;
    }
    return j;
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    RunOutcome outcome;

    const ProblemDefinition prob = build_model(cfg.doc.at("model"), cfg.seed);

    std::optional<SlowCertificate> cert;
    const bool wants_cert =
        has_analysis(cfg, "certify-slow") ||
        (cfg.doc["initial"].contains("preset") &&
         cfg.doc["initial"]["preset"].get<std::string>() == "certified_sample");
    if (wants_cert) {
        try {
            cert = compute_constants(prob.bounds, prob.spectrum.spectral_gap());
        } catch (const std::exception&) {
            // reported by the certify block below
        }
    }

    const StateVector u0 =
        build_initial(cfg.doc.at("initial"), prob, cfg.seed, cert ? &*cert : nullptr);

    IntegratorConfig icfg = cfg.integrator;
    icfg.store_states =
        cfg.store_states || has_analysis(cfg, "check-quotients") || has_analysis(cfg, "classify");
    const Trajectory traj = integrate(prob, u0, icfg);

    const std::string csv = out_dir + "/trajectory.csv";
    write_trajectory_csv(csv, traj);
    outcome.artifacts.push_back(csv);

    const json meta = report_meta(cfg, prob);
    bool pass = true;

    auto emit = [&](const std::string& name, json j) {
        j["meta"] = meta;
        const std::string path = out_dir + "/" + name;
        write_json(path, j);
        outcome.artifacts.push_back(path);
    };

    for (const std::string& a : cfg.analyses) {
        if (a == "classify") emit("classification.json", classification_block(cfg, prob, traj, pass));
        else if (a == "check-quotients") emit("quotient_report.json", quotient_block(cfg, prob, traj, pass));
        else if (a == "certify-slow") emit("certificate.json", certify_block(cfg, prob, u0, cert, pass));
        else if (a == "construct-fast") emit("solution.json", construct_block(cfg, prob, pass));
    }

    emit("summary.json", json{{"pass", pass},
                              {"analyses", cfg.analyses},
                              {"terminated",
                               traj.terminated == Termination::completed ? "completed"
                               : traj.terminated == Termination::blowup ? "blowup"
                                                                          : "left_ball"}});
    outcome.all_pass = pass;
    outcome.exit_code = pass ? 0 : 1;
    return outcome;
}

RunOutcome run_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (!cfg.doc.contains("sweep")) throw ConfigError("sweep: config has no sweep section");
    const json& sweep = cfg.doc["sweep"];
    const auto& axes = sweep["axes"];
    std::size_t budget = 1024;
    if (sweep.contains("budget")) budget = sweep["budget"].get<std::size_t>();

    std::size_t count = 1;
    for (const auto& ax : axes) count *= ax["values"].size();
    if (count > budget)
        throw ConfigError("sweep: grid of " + std::to_string(count) +
                          " points exceeds budget " + std::to_string(budget));

    fs::create_directories(out_dir);
    RunOutcome outcome;
    json manifest{{"points", json::array()}, {"count", count}};

    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t point = 0; point < count; ++point) {
        json doc = cfg.doc;
        doc.erase("sweep");
        json overrides;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const std::string path = axes[a]["path"].get<std::string>();
            const json& value = axes[a]["values"][idx[a]];
            std::string ptr = "/" + path;
            for (auto& ch : ptr)
                if (ch == '.') ch = '/';
            doc[json::json_pointer(ptr)] = value;
            overrides[path] = value;
        }
        ExperimentConfig point_cfg = parse_config_text(doc.dump());
        point_cfg.seed = cfg.seed + point;
        point_cfg.doc["seed"] = point_cfg.seed;
        point_cfg.store_states = cfg.store_states || point_cfg.store_states;

        char sub[32];
        std::snprintf(sub, sizeof sub, "point_%04zu", point);
        const RunOutcome r = run_experiment(point_cfg, out_dir + "/" + sub);
        manifest["points"].push_back(json{{"index", point},
                                          {"dir", sub},
                                          {"overrides", overrides},
                                          {"exit_code", r.exit_code}});
        if (!r.all_pass) outcome.all_pass = false;

        // advance the mixed-radix counter, last axis fastest
        for (std::size_t a = axes.size(); a-- > 0;) {
            if (++idx[a] < axes[a]["values"].size()) break;
            idx[a] = 0;
        }
    }
    manifest["all_pass"] = outcome.all_pass;
    write_json(out_dir + "/manifest.json", manifest);
    outcome.artifacts.push_back(out_dir + "/manifest.json");
    outcome.exit_code = outcome.all_pass ? 0 : 1;
    return outcome;
}

} // namespace decaylab
