// dicke_main.cpp — command-line driver: sweeps, figure presets, oracle runs, validation
//
// Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dicke/sweep.hpp"
#include "dicke/validate.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dicke::ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonOpts {
    std::string config_path;
    std::string output_path;
    double kappa = -1.0;     // < 0 means "not set"
    double dt = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required) {
    auto* c = cmd->add_option("-c,--config", o.config_path, "JSON configuration file");
    if (config_required) c->required();
    cmd->add_option("--output", o.output_path, "output CSV path (default: stdout)");
    cmd->add_option("--kappa", o.kappa, "photon loss rate in omega_R units");
    cmd->add_option("--dt", o.dt, "coarse-graining time step");
}

dicke::SweepConfig make_config(const CommonOpts& o, const dicke::SweepConfig* preset) {
    dicke::SweepConfig cfg;
    if (!o.config_path.empty()) {
        cfg = dicke::parse_config(read_file(o.config_path));
    } else if (preset) {
        cfg = *preset;
    } else {
        throw dicke::ConfigError("a config file is required (use -c/--config)");
    }
    if (o.kappa >= 0.0) {
        cfg.kappa = o.kappa;
        cfg.base.kappa = o.kappa;
    }
    if (o.dt > 0.0) cfg.coarse_grain_dt = o.dt;
    if (!o.output_path.empty()) cfg.output = o.output_path;
    return cfg;
}

template <typename Runner>
int run_to_output(const dicke::SweepConfig& cfg, Runner&& runner) {
    if (cfg.output.empty() || cfg.output == "-") {
        runner(cfg, std::cout);
        return 0;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw dicke::ConfigError("cannot open output file: " + cfg.output);
    runner(cfg, out);
    out.flush();
    if (!out) throw dicke::ConfigError("write failure on output file: " + cfg.output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zero-temperature phase diagram, fluctuation spectrum and measurement"
                 " back-action diffusion rates of the cavity-BEC Dicke model"};
    app.require_subcommand(1);

    CommonOpts sweep_opts, fig1_opts, fig2_opts, oracle_opts;
    auto* sweep = app.add_subcommand("sweep", "run a y-sweep from a JSON config");
    add_common(sweep, sweep_opts, /*config_required=*/true);
    auto* fig1 = app.add_subcommand("fig1", "order parameters and incoherent populations preset");
    add_common(fig1, fig1_opts, false);
    auto* fig2 = app.add_subcommand("fig2", "diffusion-rate preset (kappa = omega_R by default)");
    add_common(fig2, fig2_opts, false);
    auto* oracle = app.add_subcommand("oracle", "finite-N exact-diagonalization comparison");
    add_common(oracle, oracle_opts, true);
    auto* validate = app.add_subcommand("validate", "run the cross-module invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (sweep->parsed()) {
            return run_to_output(make_config(sweep_opts, nullptr),
                                 [](const auto& c, std::ostream& os) { dicke::run_sweep(c, os); });
        }
        if (fig1->parsed()) {
            const auto preset = dicke::fig1_config();
            return run_to_output(make_config(fig1_opts, &preset),
                                 [](const auto& c, std::ostream& os) { dicke::run_sweep(c, os); });
        }
        if (fig2->parsed()) {
            const auto preset = dicke::fig2_config();
            return run_to_output(make_config(fig2_opts, &preset),
                                 [](const auto& c, std::ostream& os) { dicke::run_sweep(c, os); });
        }
        if (oracle->parsed()) {
            return run_to_output(make_config(oracle_opts, nullptr),
                                 [](const auto& c, std::ostream& os) { dicke::run_oracle_compare(c, os); });
        }
        if (validate->parsed()) {
            const auto results = dicke::run_validation_suite();
            int failures = 0;
            for (const auto& r : results) {
                std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
                if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
                std::cout << '\n';
                if (!r.passed) ++failures;
            }
            std::cout << results.size() - failures << "/" << results.size() << " checks passed\n";
            return failures == 0 ? 0 : 2;
        }
    } catch (const dicke::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const dicke::RegimeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const dicke::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
