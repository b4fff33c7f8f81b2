#include "dicke/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "dicke/ed.hpp"
#include "dicke/fluctuations.hpp"
#include "dicke/meanfield.hpp"
#include "dicke/noise.hpp"

namespace dicke {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) { known = true; break; }
        }
        if (!known) {
            throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
        }
    }
}

double require_number(const json& j, const char* key) {
    if (!j.at(key).is_number()) {
        throw ConfigError(std::string("config: key \"") + key + "\" must be a number");
    }
    return j.at(key).get<double>();
}

YGrid parse_grid(const json& j) {
    reject_unknown_keys(j, {"min", "max", "points", "scale"}, "y_grid");
    YGrid g;
    if (j.contains("min")) g.min = require_number(j, "min");
    if (j.contains("max")) g.max = require_number(j, "max");
    if (j.contains("points")) {
        if (!j.at("points").is_number_integer()) {
            throw ConfigError("config: y_grid.points must be an integer");
        }
        g.points = j.at("points").get<int>();
    }
    if (j.contains("scale")) {
        const std::string s = j.at("scale").get<std::string>();
        if (s == "absolute") g.scale = YGrid::Scale::Absolute;
        else if (s == "y_over_ycrit") g.scale = YGrid::Scale::YOverYcrit;
        else throw ConfigError("config: y_grid.scale must be \"absolute\" or \"y_over_ycrit\"");
    }
    if (g.points < 2) throw ConfigError("config: y_grid.points must be >= 2");
    if (!(g.min < g.max)) throw ConfigError("config: y_grid.min must be smaller than y_grid.max");
    if (g.min < 0.0) throw ConfigError("config: y_grid.min must be non-negative");
    return g;
}

PhysicalInputs parse_physical(const json& j) {
    reject_unknown_keys(
        j, {"delta_A", "delta_C", "g0", "omega", "N", "omega_R", "mass", "wavenumber", "kappa"},
        "physical");
    PhysicalInputs p;
    p.atom_pump_detuning = require_number(j, "delta_A");
    p.cavity_pump_detuning = require_number(j, "delta_C");
    p.single_photon_rabi = require_number(j, "g0");
    p.pump_rabi = require_number(j, "omega");
    if (!j.at("N").is_number_integer()) throw ConfigError("config: physical.N must be an integer");
    p.atom_number = j.at("N").get<long long>();
    if (j.contains("omega_R")) p.recoil = require_number(j, "omega_R");
    if (j.contains("mass")) p.mass = require_number(j, "mass");
    if (j.contains("wavenumber")) p.wavenumber = require_number(j, "wavenumber");
    if (j.contains("kappa")) p.photon_loss = require_number(j, "kappa");
    return p;
}

} // namespace

SweepConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown_keys(j,
                        {"omega_R", "delta_C", "u", "kappa", "N", "physical", "y_grid",
                         "coarse_grain_dt", "oracle", "output"},
                        "the top level");

    SweepConfig cfg;
    if (j.contains("physical")) {
        for (const char* k : {"omega_R", "delta_C", "u", "N"}) {
            if (j.contains(k)) {
                throw ConfigError(std::string("config: key \"") + k +
                                  "\" conflicts with the \"physical\" block");
            }
        }
        cfg.base = reduce_parameters(parse_physical(j.at("physical")));
        cfg.kappa = cfg.base.kappa;
    } else {
        if (!j.contains("delta_C")) throw ConfigError("config: \"delta_C\" is required");
        cfg.base.omega_R = j.contains("omega_R") ? require_number(j, "omega_R") : 1.0;
        cfg.base.delta_C = require_number(j, "delta_C");
        cfg.base.u = j.contains("u") ? require_number(j, "u") : 0.0;
        if (j.contains("N")) {
            if (!j.at("N").is_number_integer()) throw ConfigError("config: N must be an integer");
            cfg.base.atom_number = j.at("N").get<long long>();
        }
    }
    if (j.contains("kappa")) cfg.kappa = require_number(j, "kappa");
    cfg.base.kappa = cfg.kappa;
    cfg.base.y = 0.0;
    check_reduced(cfg.base);

    if (j.contains("y_grid")) cfg.grid = parse_grid(j.at("y_grid"));
    if (j.contains("coarse_grain_dt")) {
        cfg.coarse_grain_dt = require_number(j, "coarse_grain_dt");
        if (!(*cfg.coarse_grain_dt > 0.0)) {
            throw ConfigError("config: coarse_grain_dt must be positive");
        }
    }
    if (j.contains("oracle")) {
        const json& jo = j.at("oracle");
        reject_unknown_keys(jo, {"N_list", "n_max"}, "oracle");
        OracleConfig oc;
        if (!jo.contains("N_list") || !jo.at("N_list").is_array() || jo.at("N_list").empty()) {
            throw ConfigError("config: oracle.N_list must be a non-empty array of integers");
        }
        for (const auto& v : jo.at("N_list")) {
            if (!v.is_number_integer()) throw ConfigError("config: oracle.N_list entries must be integers");
            oc.atom_numbers.push_back(v.get<int>());
        }
        if (jo.contains("n_max")) {
            if (!jo.at("n_max").is_number_integer()) throw ConfigError("config: oracle.n_max must be an integer");
            oc.photon_cutoff = jo.at("n_max").get<int>();
        }
        cfg.oracle = std::move(oc);
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    return cfg;
}

SweepConfig fig1_config() {
    SweepConfig cfg;
    cfg.base.omega_R = 1.0;
    cfg.base.delta_C = -100.0;
    cfg.base.u = -0.1;
    cfg.base.kappa = 1.0;
    cfg.kappa = 1.0;
    cfg.grid = YGrid{};  // y/y_crit in [0, 2], 401 points
    return cfg;
}

SweepConfig fig2_config() {
    SweepConfig cfg = fig1_config();  // same parameter set; kappa = omega_R for the rates
    return cfg;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct SweepRow {
    double y{}, y_over_ycrit{};
    double alpha0{kNaN}, beta0{kNaN}, alpha0_sq{kNaN}, beta0_sq{kNaN};
    double m0{kNaN}, mx{kNaN}, my{kNaN}, mc{kNaN};
    double omega_plus{kNaN}, omega_minus{kNaN};
    double n_photon{kNaN}, n_atom{kNaN};
    double rate_modes{kNaN}, rate_populations{kNaN}, rate_adiabatic{kNaN};
    std::string flags;
};

SweepRow evaluate_point(const SweepConfig& cfg, double y, double ycrit) {
    SweepRow row;
    row.y = y;
    row.y_over_ycrit = y / ycrit;

    ReducedParams r = cfg.base;
    r.y = y;
    const MeanFieldSolution mf = solve_displacements(r);
    row.alpha0 = mf.alpha0;
    row.beta0 = mf.beta0;
    row.alpha0_sq = mf.alpha0 * mf.alpha0;
    row.beta0_sq = mf.beta0 * mf.beta0;

    const QuadraticCoeffs q = quadratic_coefficients(r, mf);
    row.m0 = q.m0;
    row.mx = q.mx;
    row.my = q.my;
    row.mc = q.mc;

    const NormalModeSpectrum spec = eigenfrequencies(q);
    row.omega_plus = spec.omega_plus;
    row.omega_minus = spec.omega_minus;
    if (!spec.stable) {
        row.flags = "unstable";
        return row;
    }

    const GroundStateStats stats = ground_state_populations(q);
    if (stats.diverged) {
        row.flags = "critical";
    } else {
        row.n_photon = stats.n_photon;
        row.n_atom = stats.n_atom;
    }

    const DiffusionRates rates = diffusion_rates(q, r, cfg.kappa, cfg.coarse_grain_dt);
    row.rate_modes = rates.rate_modes;
    row.rate_populations = rates.rate_populations;
    row.rate_adiabatic = rates.rate_adiabatic;
    return row;
}

// Order-preserving parallel map over the grid indices.
template <typename F>
void parallel_for(int n, F&& body) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = static_cast<int>(std::max(1u, std::min(hw, 8u)));
    if (workers == 1 || n < 4) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

void run_sweep(const SweepConfig& cfg, std::ostream& out) {
    check_reduced(cfg.base);
    const double ycrit = critical_coupling(cfg.base);
    const int n = cfg.grid.points;

    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) {
        const double x = cfg.grid.min + (cfg.grid.max - cfg.grid.min) * i / (n - 1);
        ys[i] = (cfg.grid.scale == YGrid::Scale::YOverYcrit) ? x * ycrit : x;
    }

    std::vector<SweepRow> rows(n);
    std::vector<std::string> errors(n);
    parallel_for(n, [&](int i) {
        try {
            rows[i] = evaluate_point(cfg, ys[i], ycrit);
        } catch (const Error& e) {
            rows[i].y = ys[i];
            rows[i].y_over_ycrit = ys[i] / ycrit;
            rows[i].flags = "error";
            errors[i] = e.what();
        }
    });
    for (int i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            throw NumericalError("sweep point y = " + format_value(ys[i]) + ": " + errors[i]);
        }
    }

    out << "y,y_over_ycrit,alpha0,beta0,alpha0_sq,beta0_sq,M0,Mx,My,Mc,"
           "omega_plus,omega_minus,n_photon_incoh,n_atom_incoh,"
           "rate_modes,rate_populations,rate_adiabatic,flags\n";
    for (const SweepRow& r : rows) {
        out << format_value(r.y) << ',' << format_value(r.y_over_ycrit) << ','
            << format_value(r.alpha0) << ',' << format_value(r.beta0) << ','
            << format_value(r.alpha0_sq) << ',' << format_value(r.beta0_sq) << ','
            << format_value(r.m0) << ',' << format_value(r.mx) << ',' << format_value(r.my) << ','
            << format_value(r.mc) << ',' << format_value(r.omega_plus) << ','
            << format_value(r.omega_minus) << ',' << format_value(r.n_photon) << ','
            << format_value(r.n_atom) << ',' << format_value(r.rate_modes) << ','
            << format_value(r.rate_populations) << ',' << format_value(r.rate_adiabatic) << ','
            << r.flags << '\n';
    }
}

void run_oracle_compare(const SweepConfig& cfg, std::ostream& out) {
    if (!cfg.oracle || cfg.oracle->atom_numbers.empty()) {
        throw ConfigError("oracle: a non-empty oracle.N_list is required");
    }
    check_reduced(cfg.base);
    const double ycrit = critical_coupling(cfg.base);

    std::vector<double> ys(cfg.grid.points);
    for (int i = 0; i < cfg.grid.points; ++i) {
        const double x = cfg.grid.min + (cfg.grid.max - cfg.grid.min) * i / (cfg.grid.points - 1);
        ys[i] = (cfg.grid.scale == YGrid::Scale::YOverYcrit) ? x * ycrit : x;
    }

    out << "y,y_over_ycrit,N,n_max,ed_ground_energy,ed_gap,ed_gap2,ed_n_photon_per_N,"
           "ed_sz_per_N,ed_beta2,ed_parity,ed_converged,beta0_sq,omega_minus,"
           "diff_beta2,diff_gap\n";
    for (double y : ys) {
        ReducedParams r = cfg.base;
        r.y = y;
        const MeanFieldSolution mf = solve_displacements(r);
        const QuadraticCoeffs q = quadratic_coefficients(r, mf);
        const NormalModeSpectrum spec = eigenfrequencies(q);
        const double beta0_sq = mf.beta0 * mf.beta0;

        for (int N : cfg.oracle->atom_numbers) {
            ReducedParams rn = r;
            rn.atom_number = N;
            const int cutoff = cfg.oracle->photon_cutoff
                                   ? *cfg.oracle->photon_cutoff
                                   : ed::default_photon_cutoff(rn);
            const ed::SpinPhotonBasis basis(N, cutoff);
            const ed::EDResult res = ed::ground_state_solve(rn, basis);
            const double diff_beta2 = std::abs(res.order_param_beta2 - beta0_sq);
            const double diff_gap = std::abs(res.gap - spec.omega_minus);
            out << format_value(y) << ',' << format_value(y / ycrit) << ',' << N << ','
                << res.photon_cutoff_used << ',' << format_value(res.ground_energy) << ','
                << format_value(res.gap) << ',' << format_value(res.gap2) << ','
                << format_value(res.n_photon_per_N) << ',' << format_value(res.sz_per_N) << ','
                << format_value(res.order_param_beta2) << ','
                << format_value(res.parity_expectation) << ',' << (res.converged ? 1 : 0) << ','
                << format_value(beta0_sq) << ',' << format_value(spec.omega_minus) << ','
                << format_value(diff_beta2) << ',' << format_value(diff_gap) << '\n';
        }
    }
}

} // namespace dicke
