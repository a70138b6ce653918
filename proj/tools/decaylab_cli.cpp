#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "decaylab/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool store_states = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "seed override")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_flag("--store-states", opts.store_states, "store per-mode coefficients in the CSV");
}

int run_with(const CommonOpts& opts, const char* forced_analysis, bool sweep) {
    try {
        decaylab::ExperimentConfig cfg = decaylab::parse_config_file(opts.config_path);
        if (opts.seed_set) {
            cfg.seed = opts.seed;
            cfg.doc["seed"] = opts.seed;
        }
        if (opts.store_states) cfg.store_states = true;
        if (forced_analysis != nullptr) cfg.analyses = {forced_analysis};
        const decaylab::RunOutcome out = sweep ? decaylab::run_sweep(cfg, opts.out_dir)
                                               : decaylab::run_experiment(cfg, opts.out_dir);
        if (!out.all_pass)
            std::fprintf(stderr, "decaylab: assertion failure; see reports in %s\n",
                         opts.out_dir.c_str());
        return out.exit_code;
    } catch (const decaylab::ConfigError& e) {
        std::fprintf(stderr, "decaylab: config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "decaylab: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decay-rate laboratory for semilinear evolution equations"};
    app.require_subcommand(1);

    CommonOpts sim, cls, cert, fast, quot, swp;
    CLI::App* c_sim = app.add_subcommand("simulate", "integrate and run configured analyses");
    add_common(c_sim, sim);
    CLI::App* c_cls = app.add_subcommand("classify", "label the decay regime of a trajectory");
    add_common(c_cls, cls);
    CLI::App* c_cert =
        app.add_subcommand("certify-slow", "certify initial data for the slow open set");
    add_common(c_cert, cert);
    CLI::App* c_fast =
        app.add_subcommand("construct-fast", "build a fast solution with prescribed profile");
    add_common(c_fast, fast);
    CLI::App* c_quot =
        app.add_subcommand("check-quotients", "verify the quotient derivative bounds");
    add_common(c_quot, quot);
    CLI::App* c_swp = app.add_subcommand("sweep", "run the config over a parameter grid");
    add_common(c_swp, swp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (c_sim->parsed()) return run_with(sim, nullptr, false);
    if (c_cls->parsed()) return run_with(cls, "classify", false);
    if (c_cert->parsed()) return run_with(cert, "certify-slow", false);
    if (c_fast->parsed()) return run_with(fast, "construct-fast", false);
    if (c_quot->parsed()) return run_with(quot, "check-quotients", false);
    if (c_swp->parsed()) return run_with(swp, nullptr, true);
    return 2;
}
