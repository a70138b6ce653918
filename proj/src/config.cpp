#include "decaylab/config.hpp"

#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "decaylab/quotients.hpp"

namespace decaylab {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError(path + "." + it.key() + ": unknown key");
    }
}

double require_num(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(path + "." + key + ": missing");
    if (!obj[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return obj[key].get<double>();
}

double opt_num(const json& obj, const std::string& path, const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return obj[key].get<double>();
}

bool opt_bool(const json& obj, const std::string& path, const char* key, bool dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_boolean()) throw ConfigError(path + "." + key + ": expected a boolean");
    return obj[key].get<bool>();
}

IntegratorConfig parse_integrator(const json& obj) {
    check_keys(obj, "integrator", {"dt", "t_end", "scheme", "diag_stride", "blowup_norm"});
    IntegratorConfig cfg;
    cfg.t_end = require_num(obj, "integrator", "t_end");
    cfg.dt = opt_num(obj, "integrator", "dt", 1e-3);
    cfg.blowup_norm = opt_num(obj, "integrator", "blowup_norm", 1e6);
    cfg.diag_stride =
        static_cast<std::size_t>(opt_num(obj, "integrator", "diag_stride", 1.0));
    if (cfg.diag_stride == 0) throw ConfigError("integrator.diag_stride: must be positive");
    if (obj.contains("scheme")) {
        const std::string s = obj["scheme"].get<std::string>();
        if (s == "etd1") cfg.scheme = Scheme::etd1;
        else if (s == "etd2rk") cfg.scheme = Scheme::etd2rk;
        else throw ConfigError("integrator.scheme: expected etd1 or etd2rk");
    }
    if (!(cfg.dt > 0.0) || !(cfg.dt < cfg.t_end))
        throw ConfigError("integrator: need 0 < dt < t_end");
    if (!(cfg.blowup_norm > 0.0)) throw ConfigError("integrator.blowup_norm: must be positive");
    return cfg;
}

const std::initializer_list<const char*> known_analyses = {
    "classify", "certify-slow", "construct-fast", "check-quotients"};

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    try {
        cfg.doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    check_keys(cfg.doc, "config",
               {"model", "initial", "integrator", "analyses", "quotients", "construct_fast",
                "classify", "certify_slow", "seed", "store_states", "sweep"});
    if (!cfg.doc.contains("model")) throw ConfigError("config.model: missing");
    if (!cfg.doc.contains("initial")) throw ConfigError("config.initial: missing");
    if (!cfg.doc.contains("integrator")) throw ConfigError("config.integrator: missing");
    cfg.integrator = parse_integrator(cfg.doc["integrator"]);

    if (cfg.doc.contains("seed")) {
        if (!cfg.doc["seed"].is_number_unsigned())
            throw ConfigError("config.seed: expected an unsigned integer");
        cfg.seed = cfg.doc["seed"].get<std::uint64_t>();
    }
    cfg.store_states = opt_bool(cfg.doc, "config", "store_states", false);

    if (cfg.doc.contains("analyses")) {
        if (!cfg.doc["analyses"].is_array())
            throw ConfigError("config.analyses: expected an array");
        for (const auto& a : cfg.doc["analyses"]) {
            const std::string name = a.get<std::string>();
            bool known = false;
            for (const char* k : known_analyses)
                if (name == k) known = true;
            if (!known) throw ConfigError("config.analyses: unknown analysis '" + name + "'");
            cfg.analyses.push_back(name);
        }
    }

    // validate optional analysis sections up front
    if (cfg.doc.contains("quotients")) {
        check_keys(cfg.doc["quotients"], "quotients", {"d_values"});
        if (cfg.doc["quotients"].contains("d_values") &&
            !cfg.doc["quotients"]["d_values"].is_array())
            throw ConfigError("quotients.d_values: expected an array");
    }
    if (cfg.doc.contains("classify")) {
        check_keys(cfg.doc["classify"], "classify", {"expect_verdict"});
    }
    if (cfg.doc.contains("certify_slow")) {
        check_keys(cfg.doc["certify_slow"], "certify_slow", {"monitor_t_end", "monitor_dt"});
    }
    if (cfg.doc.contains("construct_fast")) {
        check_keys(cfg.doc["construct_fast"], "construct_fast",
                   {"lambda_index", "r0", "v0_amplitude", "w0_block", "w0_amplitude", "v0",
                    "w0", "validate", "profile_tol", "grid_tol", "window"});
        if (!cfg.doc["construct_fast"].contains("lambda_index"))
            throw ConfigError("construct_fast.lambda_index: missing");
    }
    if (cfg.doc.contains("sweep")) {
        check_keys(cfg.doc["sweep"], "sweep", {"axes", "budget"});
        if (!cfg.doc["sweep"].contains("axes") || !cfg.doc["sweep"]["axes"].is_array())
            throw ConfigError("sweep.axes: expected an array");
        for (const auto& ax : cfg.doc["sweep"]["axes"]) {
            check_keys(ax, "sweep.axes[]", {"path", "values"});
            if (!ax.contains("path") || !ax["path"].is_string())
                throw ConfigError("sweep.axes[].path: expected a string");
            if (!ax.contains("values") || !ax["values"].is_array() || ax["values"].empty())
                throw ConfigError("sweep.axes[].values: expected a nonempty array");
        }
    }

    // model and initial are validated for shape here; semantic checks
    // happen when they are built.
    const json& model = cfg.doc["model"];
    if (!model.is_object() || !model.contains("name"))
        throw ConfigError("config.model.name: missing");
    const json& initial = cfg.doc["initial"];
    check_keys(initial, "initial",
               {"coefficients", "preset", "amplitude", "index", "scale", "perturbation"});
    const bool has_coeff = initial.contains("coefficients");
    const bool has_preset = initial.contains("preset");
    if (has_coeff == has_preset)
        throw ConfigError("initial: exactly one of 'coefficients' or 'preset' required");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ProblemDefinition build_model(const json& model, std::uint64_t seed) {
    const std::string name = model.at("name").get<std::string>();
    if (name == "ode2_slow") {
        check_keys(model, "model", {"name"});
        return make_ode2_slow();
    }
    if (name == "ode2_fast") {
        check_keys(model, "model", {"name", "lambda", "beta", "p", "q"});
        return make_ode2_fast(require_num(model, "model", "lambda"),
                              require_num(model, "model", "beta"),
                              require_num(model, "model", "p"),
                              require_num(model, "model", "q"));
    }
    if (name == "neumann_interval") {
        check_keys(model, "model", {"name", "modes", "p", "c"});
        return make_neumann_interval(
            static_cast<std::size_t>(require_num(model, "model", "modes")),
            require_num(model, "model", "p"), require_num(model, "model", "c"),
            seed == 0 ? default_bounds_seed : seed);
    }
    if (name == "dirichlet_interval") {
        check_keys(model, "model", {"name", "modes", "p", "c", "critical"});
        return make_dirichlet_interval(
            static_cast<std::size_t>(require_num(model, "model", "modes")),
            require_num(model, "model", "p"), require_num(model, "model", "c"),
            opt_bool(model, "model", "critical", true),
            seed == 0 ? default_bounds_seed : seed);
    }
    if (name == "custom") {
        check_keys(model, "model",
                   {"name", "eigenvalues", "multiplicities", "nonlinearity", "bounds"});
        std::vector<double> eigs = model.at("eigenvalues").get<std::vector<double>>();
        std::vector<std::size_t> mult;
        if (model.contains("multiplicities"))
            mult = model["multiplicities"].get<std::vector<std::size_t>>();
        else
            mult.assign(eigs.size(), 1);
        std::vector<PolynomialTerm> terms;
        if (model.contains("nonlinearity")) {
            for (const auto& t : model["nonlinearity"]) {
                check_keys(t, "model.nonlinearity[]", {"target", "coeff", "factors"});
                PolynomialTerm term;
                term.target = t.at("target").get<std::size_t>();
                term.coeff = t.at("coeff").get<double>();
                for (const auto& f : t.at("factors"))
                    term.factors.emplace_back(f.at(0).get<std::size_t>(),
                                              f.at(1).get<unsigned>());
                terms.push_back(std::move(term));
            }
        }
        OrderBounds bounds;
        if (model.contains("bounds")) {
            const json& b = model["bounds"];
            check_keys(b, "model.bounds", {"K0", "p", "q", "L", "R", "sign_condition"});
            bounds.K0 = opt_num(b, "model.bounds", "K0", 0.0);
            bounds.p = opt_num(b, "model.bounds", "p", 1.0);
            bounds.q = opt_num(b, "model.bounds", "q", bounds.p);
            bounds.L = opt_num(b, "model.bounds", "L", 0.0);
            bounds.R = opt_num(b, "model.bounds", "R", 1.0);
            bounds.sign_condition = opt_bool(b, "model.bounds", "sign_condition", false);
        }
        try {
            return make_custom("custom", SpectrumSpec::make(std::move(eigs), std::move(mult)),
                               std::move(terms), bounds);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    }
    throw ConfigError("model.name: unknown model '" + name + "'");
}

namespace {

StateVector certified_sample(const ProblemDefinition& prob, const SlowCertificate& cert,
                             std::uint64_t seed, std::optional<double> scale,
                             double perturbation) {
    const auto& spec = prob.spectrum;
    if (!spec.has_kernel())
        throw ConfigError("initial.preset certified_sample: model has no kernel");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double s = scale ? *scale : 0.2 + 0.7 * u01(rng);
    double amp = s * cert.sigma0;
    if (u01(rng) < 0.5) amp = -amp;

    StateVector u0(spec.total_dim);
    u0[0] = amp;

    StateVector dir(spec.total_dim);
    for (auto& v : dir.c) v = gauss(rng);
    const double nd = norm_Dhalf(spec, dir);
    if (nd > 0.0)
        for (auto& v : dir.c) v /= nd;

    // shrink the perturbation until the point sits well inside the strict
    // inequalities, so the 1e-3 openness probes cannot push it out
    double eps = perturbation * std::abs(amp);
    const double d = 2.0 * cert.p;
    for (int k = 0; k < 60; ++k) {
        StateVector cand = u0 + (eps * dir);
        const double nH = norm_H(cand);
        const bool inside = certify(spec, cand, cert).member && nH < 0.95 * cert.sigma0 &&
                            quotient(spec, cand, d) < 0.8 * cert.K1;
        if (inside) return cand;
        eps /= 2.0;
    }
    return u0;
}

} // namespace

StateVector build_initial(const json& initial, const ProblemDefinition& prob,
                          std::uint64_t seed, const SlowCertificate* cert) {
    const auto& spec = prob.spectrum;
    if (initial.contains("coefficients")) {
        std::vector<double> c = initial["coefficients"].get<std::vector<double>>();
        if (c.size() != spec.total_dim)
            throw ConfigError("initial.coefficients: expected " +
                              std::to_string(spec.total_dim) + " entries");
        return StateVector(std::move(c));
    }
    const std::string preset = initial.at("preset").get<std::string>();
    if (preset == "kernel_constant") {
        if (!spec.has_kernel())
            throw ConfigError("initial.preset kernel_constant: model has no kernel");
        StateVector u0(spec.total_dim);
        u0[0] = require_num(initial, "initial", "amplitude");
        return u0;
    }
    if (preset == "mode") {
        const auto idx = static_cast<std::size_t>(require_num(initial, "initial", "index"));
        if (idx >= spec.total_dim) throw ConfigError("initial.index: out of range");
        StateVector u0(spec.total_dim);
        u0[idx] = require_num(initial, "initial", "amplitude");
        return u0;
    }
    if (preset == "certified_sample") {
        if (cert == nullptr)
            throw ConfigError("initial.preset certified_sample: no certificate available");
        std::optional<double> scale;
        if (initial.contains("scale")) scale = require_num(initial, "initial", "scale");
        const double pert = opt_num(initial, "initial", "perturbation", 0.05);
        return certified_sample(prob, *cert, seed, scale, pert);
    }
    throw ConfigError("initial.preset: unknown preset '" + preset + "'");
}

} // namespace decaylab
