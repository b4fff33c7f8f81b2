#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/meanfield.hpp"
#include "dicke/sweep.hpp"

using namespace dicke;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace

TEST_CASE("parse_config applies documented defaults") {
    const auto cfg = parse_config(R"({"delta_C":-100,"u":-0.1})");
    CHECK(cfg.base.omega_R == 1.0);
    CHECK(cfg.base.delta_C == -100.0);
    CHECK(cfg.base.u == -0.1);
    CHECK(cfg.kappa == 1.0);
    CHECK(cfg.grid.min == 0.0);
    CHECK(cfg.grid.max == 2.0);
    CHECK(cfg.grid.points == 401);
    CHECK(cfg.grid.scale == YGrid::Scale::YOverYcrit);
    CHECK_FALSE(cfg.oracle.has_value());
    CHECK(cfg.output.empty());
}

TEST_CASE("parse_config rejections") {
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"delta_C":1})"), RegimeError);
    CHECK_THROWS_AS(parse_config(R"({"delta_C":-100,"unknown_key":3})"), ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"delta_C":-100,"u":-0.1,"y_grid":{"min":0,"max":2,"points":1,"scale":"y_over_ycrit"}})"),
        ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"delta_C":-100,"y_grid":{"min":2,"max":1,"points":5}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"delta_C":-100,"oracle":{"N_list":[]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"delta_C":-100,"y_grid":{"scale":"weird"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"([1,2,3])"), ConfigError);
}

TEST_CASE("parse_config accepts physical inputs") {
    const auto cfg = parse_config(R"({
        "physical": {"delta_A": -1e7, "delta_C": -100, "g0": 2.0,
                      "omega": 21213.203435596426, "N": 1000000, "omega_R": 1.0, "kappa": 1.0}
    })");
    CHECK(cfg.base.u == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(cfg.base.delta_C == doctest::Approx(-99.8).epsilon(1e-12));
    CHECK_THROWS_AS(parse_config(R"({"delta_C":-5,"physical":{"delta_A":-1,"delta_C":-1,"g0":0,"omega":0,"N":1}})"),
                    ConfigError);
}

TEST_CASE("two-point sweep emits a header and two rows") {
    auto cfg = parse_config(R"({"delta_C":-100,"u":-0.1,"y_grid":{"min":0,"max":2,"points":2}})");
    std::ostringstream out;
    run_sweep(cfg, out);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 3);
    const auto header = split(rows[0]);
    REQUIRE(header.size() == 18);
    CHECK(header[0] == "y");
    CHECK(header[1] == "y_over_ycrit");
    CHECK(header[16] == "rate_adiabatic");
    CHECK(header[17] == "flags");
    CHECK(split(rows[1])[0] == "0");
    CHECK(std::stod(split(rows[2])[0]) == doctest::Approx(20.0));
}

TEST_CASE("fig1 preset columns follow the mean-field branch") {
    auto cfg = fig1_config();
    cfg.grid.points = 41;  // light grid for the test; same physics
    std::ostringstream out;
    run_sweep(cfg, out);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 42);

    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cols = split(rows[i]);
        REQUIRE(cols.size() == 18);
        const double yr = std::stod(cols[1]);
        const double b2 = std::stod(cols[5]);
        if (yr <= 1.0) {
            CHECK(b2 == 0.0);
        } else {
            ReducedParams r = cfg.base;
            r.y = std::stod(cols[0]);
            const auto s = solve_displacements(r);
            CHECK(b2 == doctest::Approx(s.beta0 * s.beta0).epsilon(1e-13));
        }
    }

    // the exactly-critical row is flagged and carries nan in the diverging columns
    const auto critical = split(rows[21]);
    CHECK(std::stod(critical[1]) == doctest::Approx(1.0));
    CHECK(critical[12] == "nan");
    CHECK(critical[14] == "nan");
    CHECK(critical[17] == "critical");
    CHECK(std::isfinite(std::stod(critical[15])));  // population rate stays finite
}

TEST_CASE("fig2 preset: rate columns behave across the transition") {
    auto cfg = fig2_config();
    cfg.grid.points = 41;
    std::ostringstream out;
    run_sweep(cfg, out);
    const auto rows = lines_of(out.str());

    double rate_modes_before = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cols = split(rows[i]);
        const double yr = std::stod(cols[1]);
        if (yr > 0.0 && yr < 1.0) {
            const double rm = std::stod(cols[14]);
            CHECK(rm >= rate_modes_before);
            rate_modes_before = rm;
            // coarse-grained rate tracks the adiabatic estimate below threshold
            if (yr >= 0.1 && yr <= 0.9) {
                CHECK(std::stod(cols[15]) == doctest::Approx(std::stod(cols[16])).epsilon(0.05));
            }
        }
    }
}

TEST_CASE("sweep output is byte-deterministic") {
    auto cfg = fig1_config();
    cfg.grid.points = 51;
    std::ostringstream a, b;
    run_sweep(cfg, a);
    run_sweep(cfg, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("\r") == std::string::npos);
}

TEST_CASE("oracle comparison table") {
    auto cfg = parse_config(R"({
        "delta_C": -100, "u": -0.1,
        "y_grid": {"min": 0, "max": 2, "points": 2, "scale": "y_over_ycrit"},
        "oracle": {"N_list": [6, 12], "n_max": 24}
    })");
    std::ostringstream out;
    run_oracle_compare(cfg, out);
    const auto rows = lines_of(out.str());
    REQUIRE(rows.size() == 5);  // header + 2 y-points x 2 N

    const auto header = split(rows[0]);
    CHECK(header[4] == "ed_ground_energy");
    CHECK(header[14] == "diff_beta2");

    // y = 0 rows: the finite-N gap equals omega_R and matches omega_minus exactly
    for (int i : {1, 2}) {
        const auto cols = split(rows[i]);
        CHECK(std::stod(cols[0]) == 0.0);
        CHECK(std::stod(cols[5]) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::stod(cols[15]) < 1e-8);
    }
    // y = 2 y_crit rows: the mean-field mismatch shrinks with N
    const double d6 = std::stod(split(rows[3])[14]);
    const double d12 = std::stod(split(rows[4])[14]);
    CHECK(d12 < d6);

    SUBCASE("missing oracle block is a usage error") {
        auto bad = parse_config(R"({"delta_C":-100})");
        std::ostringstream sink;
        CHECK_THROWS_AS(run_oracle_compare(bad, sink), ConfigError);
    }
}
