#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <regex>

#include "parex/commands.hpp"

using namespace parex;

namespace {

std::string write_temp_config(const std::string& text, const std::string& name) {
    std::string path = std::string("/tmp/parex_test_") + name + ".json";
    std::ofstream out(path);
    out << text;
    return path;
}

const char* kOuConfig = R"({
  "dim": 1,
  "drift": [{"type": "poly", "coeffs": [{"gamma": [1], "value": -1.0}]}],
  "domain_radius": 1.0,
  "horizon": 0.5,
  "expansion": {"order": 2, "degree_cap": 8},
  "payoff": {"type": "one"}
})";

const char* kConstConfig = R"({
  "dim": 1,
  "drift": [{"type": "poly", "coeffs": [{"gamma": [0], "value": 1.0}]}],
  "expansion": {"order": 2, "degree_cap": 6},
  "horizon": 1.0,
  "payoff": {"type": "coordinate", "axis": 0}
})";

std::string strip_timestamp(std::string text) {
    static const std::regex ts("\"timestamp\": \"[^\"]*\"");
    return std::regex_replace(text, ts, "\"timestamp\": \"X\"");
}

} // namespace

TEST_CASE("config parsing: unknown keys are rejected with the offending name") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"dim": 1, "bogus": 3})"),
                         doctest::Contains("bogus"), InputError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"dim": 1, "expansion": {"orderr": 2}})"),
                         doctest::Contains("orderr"), InputError);
    CHECK_THROWS_AS(parse_config_text("{not json"), InputError);
    CHECK_THROWS_AS(parse_config_text(R"({"drift": []})"), InputError);
}

TEST_CASE("config parsing: fields and options") {
    ProblemConfig cfg = parse_config_text(kOuConfig);
    CHECK(cfg.dim == 1);
    CHECK(cfg.drift.size() == 1);
    CHECK_FALSE(cfg.drift[0].is_fourier());
    CHECK(cfg.expansion.order == 2);
    CHECK(cfg.horizon_override == doctest::Approx(0.5));
    CHECK(cfg.resolve_horizon() == doctest::Approx(0.5));
    CHECK_FALSE(cfg.config_hash.empty());
}

TEST_CASE("resolve_horizon: certified for Fourier, error for bare poly") {
    ProblemConfig fourier = parse_config_text(R"({
      "dim": 1,
      "drift": [{"type": "fourier", "terms": [{"freq": [0, 1], "sin": 2.0, "cos": 0.0}]}],
      "domain_radius": 1.0
    })");
    // ebar = 1, m0 = 1, F = 3: beta = 1/9, horizon = 0.9 beta
    CHECK(fourier.resolve_horizon() == doctest::Approx(0.9 / 9.0));

    ProblemConfig poly = parse_config_text(R"({
      "dim": 1,
      "drift": [{"type": "poly", "coeffs": [{"gamma": [1], "value": -1.0}]}]
    })");
    CHECK_THROWS_AS(poly.resolve_horizon(), InputError);
}

TEST_CASE("expansion JSON round-trips coefficient-exactly") {
    ProblemConfig cfg = parse_config_text(kOuConfig);
    std::vector<double> y{0.37};
    WkbExpansion e = expand(cfg.drift, y, 0.0, cfg.expansion);
    std::string text = expansion_to_json_text(e);
    WkbExpansion back = expansion_from_json_text(text);
    CHECK(back.order == e.order);
    CHECK(back.degree_cap == e.degree_cap);
    CHECK(back.base_point == e.base_point);
    REQUIRE(back.c.size() == e.c.size());
    for (size_t k = 0; k < e.c.size(); ++k) {
        REQUIRE(back.c[k].by_power.size() >= 1);
        const auto& s = e.c[k].by_power[0].coeffs();
        const auto& r = back.c[k].by_power[0].coeffs();
        CHECK(s == r);  // bitwise-identical coefficients
    }
}

TEST_CASE("cmd_expand emits the documented coefficients") {
    std::string path = write_temp_config(kConstConfig, "expand");
    CommandOptions opt;
    opt.config_path = path;
    std::string out;
    int rc = run_command("expand", opt, &out);
    CHECK(rc == kExitOk);
    // constant drift mu = 1: c0 has Dx coefficient -0.5, c1 constant -0.25
    CHECK(out.find("-0.5") != std::string::npos);
    CHECK(out.find("-0.25") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cmd_horizon: reference beta values and factor switch") {
    std::string p1 = write_temp_config(R"({
      "dim": 1,
      "drift": [{"type": "fourier", "terms": [{"freq": [0, 1], "sin": 2.0, "cos": 0.0}]}],
      "domain_radius": 1.0
    })", "hz1");
    CommandOptions opt;
    opt.config_path = p1;
    std::string out;
    CHECK(run_command("horizon", opt, &out) == kExitOk);
    CHECK(out.find("0.1111111111111111") != std::string::npos);

    std::string p2 = write_temp_config(R"({
      "dim": 1,
      "drift": [{"type": "fourier", "terms": [{"freq": [0, 1], "sin": 2.0, "cos": 0.0}]}],
      "domain_radius": 1.0,
      "diffusion": [[1.0]]
    })", "hz2");
    opt.config_path = p2;
    CHECK(run_command("horizon", opt, &out) == kExitOk);
    CHECK(out.find("0.05555555555555555") != std::string::npos);

    std::string p3 = write_temp_config(R"({
      "dim": 1,
      "drift": [{"type": "fourier", "terms": []}]
    })", "hz3");
    opt.config_path = p3;
    CHECK(run_command("horizon", opt, &out) == kExitOk);
    CHECK(out.find("unbounded (drift-free)") != std::string::npos);

    std::remove(p1.c_str());
    std::remove(p2.c_str());
    std::remove(p3.c_str());
}

TEST_CASE("exit codes: config=2, horizon=3, ok=0") {
    CommandOptions opt;
    opt.config_path = "/tmp/parex_missing_config.json";
    CHECK(run_command("horizon", opt, nullptr) == kExitConfig);

    std::string bad = write_temp_config(R"({"dim": 1, "whoops": true})", "badkey");
    opt.config_path = bad;
    CHECK(run_command("horizon", opt, nullptr) == kExitConfig);
    std::remove(bad.c_str());

    std::string ou = write_temp_config(kOuConfig, "ou_exit");
    opt.config_path = ou;
    opt.t = 2.0;  // beyond horizon 0.5, no --compose
    opt.x = {0.1};
    CHECK(run_command("solve", opt, nullptr) == kExitHorizon);

    opt.t = 0.05;
    CHECK(run_command("solve", opt, nullptr) == kExitOk);
    std::remove(ou.c_str());
}

TEST_CASE("solve output is deterministic modulo the timestamp") {
    std::string path = write_temp_config(R"({
      "dim": 1,
      "drift": [{"type": "poly", "coeffs": [{"gamma": [1], "value": -1.0}]}],
      "horizon": 0.5,
      "expansion": {"order": 3, "degree_cap": 10},
      "method": "monte_carlo",
      "monte_carlo": {"samples": 4000, "chunk": 512},
      "payoff": {"type": "square", "axis": 0}
    })", "determinism");
    CommandOptions opt;
    opt.config_path = path;
    opt.t = 0.1;
    opt.x = {0.3};
    opt.seed = 99;
    std::string a, b;
    CHECK(run_command("solve", opt, &a) == kExitOk);
    CHECK(run_command("solve", opt, &b) == kExitOk);
    CHECK(strip_timestamp(a) == strip_timestamp(b));
    std::remove(path.c_str());
}

TEST_CASE("cmd_compose reports composed and direct densities") {
    std::string path = write_temp_config(kOuConfig, "compose");
    CommandOptions opt;
    opt.config_path = path;
    opt.t1 = 0.1;
    opt.t2 = 0.1;
    opt.x = {0.4};
    opt.y = {0.1};
    std::string out;
    CHECK(run_command("compose", opt, &out) == kExitOk);
    CHECK(out.find("composed") != std::string::npos);
    CHECK(out.find("direct") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("solve with --compose reaches beyond the horizon") {
    std::string path = write_temp_config(R"({
      "dim": 1,
      "drift": [{"type": "poly", "coeffs": [{"gamma": [0], "value": 0.5}]}],
      "horizon": 0.11,
      "expansion": {"order": 2, "degree_cap": 6},
      "quadrature": {"nodes": 40, "window_sigmas": 9.0},
      "payoff": {"type": "coordinate", "axis": 0}
    })", "compose_n");
    CommandOptions opt;
    opt.config_path = path;
    opt.t = 0.3;  // beyond horizon 0.11
    opt.x = {0.2};
    CHECK(run_command("solve", opt, nullptr) == kExitHorizon);
    opt.compose = 3;
    std::string out;
    CHECK(run_command("solve", opt, &out) == kExitOk);
    // E[X_t] = x + mu t = 0.2 + 0.5*0.3 = 0.35
    auto pos = out.find("\"value\":");
    REQUIRE(pos != std::string::npos);
    double value = std::stod(out.substr(pos + 8));
    CHECK(value == doctest::Approx(0.35).epsilon(1e-4));
    std::remove(path.c_str());
}

TEST_CASE("cmd_split_solve writes a CSV grid with metadata") {
    std::string path = write_temp_config(R"({
      "dim": 2,
      "drift": [{"type": "poly", "coeffs": []}, {"type": "poly", "coeffs": []}],
      "expansion": {"order": 1, "degree_cap": 4},
      "split": {
        "diffusive_dim": 1,
        "diffusion": [[0.08]],
        "transport_drift": [{"type": "poly", "coeffs": [{"gamma": [0, 0], "value": 1.0}]}],
        "grid": {"lo": [-3.0, -3.0], "hi": [3.0, 3.0], "nodes": [31, 31]},
        "initial": [{"type": "gaussian", "axes": [0], "center": [0.0], "width": 0.8},
                     {"type": "gaussian", "axes": [1], "center": [0.0], "width": 0.9}],
        "T": 0.1,
        "rho": 0.5,
        "tau_step": 0.1,
        "interp_order": 5
      }
    })", "split");
    CommandOptions opt;
    opt.config_path = path;
    opt.out_path = "/tmp/parex_split_out.csv";
    std::string out;
    CHECK(run_command("split-solve", opt, &out) == kExitOk);
    CHECK(out.find("# config_hash=") != std::string::npos);
    CHECK(out.find("x1,x2,value") != std::string::npos);
    std::ifstream check(opt.out_path);
    CHECK(check.good());
    std::remove(path.c_str());
    std::remove(opt.out_path.c_str());
}

TEST_CASE("cmd_horizon --diagnose covers polynomial drift") {
    std::string path = write_temp_config(R"({
      "dim": 1,
      "drift": [{"type": "poly", "coeffs": [{"gamma": [1], "value": -1.0}]}],
      "expansion": {"order": 6, "degree_cap": 16}
    })", "diag");
    CommandOptions opt;
    opt.config_path = path;
    opt.diagnose = true;
    opt.t = 0.1;
    std::string out;
    CHECK(run_command("horizon", opt, &out) == kExitOk);
    CHECK(out.find("no certified bound; use --diagnose") != std::string::npos);
    CHECK(out.find("max_ratio") != std::string::npos);
    CHECK(out.find("converging") != std::string::npos);
    std::remove(path.c_str());
}
