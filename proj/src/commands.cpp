#include "parex/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "parex/oracle.hpp"

namespace parex {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json metadata(const ProblemConfig& cfg, const std::string& command) {
    json m;
    m["command"] = command;
    m["config_hash"] = cfg.config_hash;
    m["version"] = kVersion;
    m["timestamp"] = timestamp_now();
    return m;
}

void emit(const std::string& text, const CommandOptions& opt, std::string* output) {
    if (output) *output = text;
    std::cout << text << "\n";
    if (!opt.out_path.empty()) {
        std::ofstream out(opt.out_path);
        if (!out) throw InputError("cannot open output file '" + opt.out_path + "'");
        out << text << "\n";
    }
}

std::vector<double> base_point_or_zero(const ProblemConfig& cfg,
                                       const std::vector<double>& y) {
    if (y.empty()) return std::vector<double>(cfg.dim, 0.0);
    if (static_cast<int>(y.size()) != cfg.dim)
        throw InputError("point has wrong dimension (expected " + std::to_string(cfg.dim) +
                         ")");
    return y;
}

KernelApprox kernel_from_config(const ProblemConfig& cfg, const std::vector<double>& y) {
    std::optional<ConstantDiffusion> diff;
    if (cfg.diffusion) diff = make_constant_diffusion(*cfg.diffusion, cfg.dim);
    return KernelApprox(cfg.drift, std::move(diff), y, cfg.expansion, cfg.form,
                        cfg.resolve_horizon());
}

} // namespace

int cmd_expand(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output) {
    std::vector<double> y = base_point_or_zero(cfg, opt.y);
    WkbExpansion e = expand(cfg.drift, y, opt.t1, cfg.expansion);
    json j;
    j["metadata"] = metadata(cfg, "expand");
    j["expansion"] = json::parse(expansion_to_json_text(e));
    emit(j.dump(2), opt, output);
    return kExitOk;
}

int cmd_horizon(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output) {
    json j;
    j["metadata"] = metadata(cfg, "horizon");

    bool fourier = true;
    for (const auto& f : cfg.drift)
        if (!f.is_fourier()) fourier = false;

    double diagnose_t = 0.0;
    if (fourier) {
        FourierBounds fb = fourier_bounds(cfg.drift);
        HorizonParams hp;
        hp.n = cfg.dim;
        hp.abs_m0 = fb.abs_m0;
        hp.ebar = fb.ebar;
        hp.R = cfg.domain_radius;
        hp.variable_diffusion = cfg.diffusion.has_value();
        HorizonBound hb = beta_lower_bound(hp);
        j["m0"] = fb.abs_m0;
        j["ebar"] = fb.ebar;
        j["R"] = cfg.domain_radius;
        j["factor"] = hb.factor;
        if (hb.drift_free) {
            j["beta"] = "unbounded (drift-free)";
            diagnose_t = opt.t;
        } else {
            j["beta"] = hb.beta;
            diagnose_t = 0.9 * hb.beta;
        }
    } else {
        j["beta"] = nullptr;
        j["note"] = "no certified bound; use --diagnose";
        diagnose_t = opt.t;
    }

    if (opt.diagnose && diagnose_t > 0.0) {
        std::vector<double> y = base_point_or_zero(cfg, opt.y);
        ExpandOptions eo = cfg.expansion;
        eo.order = std::max(eo.order, 6);
        eo.degree_cap = -1;
        WkbExpansion e = expand(cfg.drift, y, 0.0, eo);
        std::vector<std::vector<double>> samples;
        for (int i = 0; i < 5; ++i) {
            std::vector<double> p(cfg.dim, 0.0);
            p[0] = -cfg.domain_radius + 2.0 * cfg.domain_radius * i / 4.0;
            samples.push_back(std::move(p));
        }
        RatioDiagnostic rd = empirical_ratio_diagnostic(e, diagnose_t, samples);
        j["diagnostic"] = {{"t", diagnose_t},
                           {"max_ratio", rd.max_ratio},
                           {"converging", rd.converging},
                           {"order", eo.order}};
    }
    emit(j.dump(2), opt, output);
    return kExitOk;
}

namespace {

// Multi-step semigroup propagation for t beyond the horizon: evolve the
// payoff on a tensor grid in n <= 2 dimensions, one kernel smoothing pass
// per substep.
double compose_solve(const KernelApprox& k, double t, int substeps,
                     std::span<const double> x, const Payoff& g, const QuadratureSpec& quad,
                     InterpOrder interp) {
    int n = k.dim();
    if (n > 2) throw InputError("--compose supports n <= 2");
    double dt = t / substeps;
    if (dt > k.horizon())
        throw HorizonError("compose: substep " + std::to_string(dt) +
                               " still exceeds the horizon " + std::to_string(k.horizon()) +
                               "; increase --compose",
                           k.horizon());
    double halfw = quad.window_sigmas * std::sqrt(2.0 * t) * 1.5;
    std::vector<double> lo(n), hi(n);
    std::vector<int> nodes(n, 2 * quad.nodes + 1);
    for (int i = 0; i < n; ++i) {
        lo[i] = x[i] - halfw;
        hi[i] = x[i] + halfw;
    }
    TensorGrid grid = TensorGrid::uniform(lo, hi, nodes);
    std::int64_t total = grid.size();
    std::vector<double> u(total);
    for (std::int64_t i = 0; i < total; ++i) u[i] = g(grid.point(i));

    for (int s = 0; s < substeps - 1; ++s) {
        GridInterpolator itp(grid, u, interp);
        Payoff f = [&](std::span<const double> yq) { return itp(yq); };
        std::vector<double> next(total);
        for (std::int64_t i = 0; i < total; ++i)
            next[i] = cauchy_solve(k, dt, grid.point(i), f, quad);
        u = std::move(next);
    }
    GridInterpolator itp(grid, u, interp);
    Payoff f = [&](std::span<const double> yq) { return itp(yq); };
    return cauchy_solve(k, dt, x, f, quad);
}

} // namespace

int cmd_solve(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output) {
    std::vector<double> x = base_point_or_zero(cfg, opt.x.empty() ? opt.y : opt.x);
    KernelApprox k = kernel_from_config(cfg, x);
    Payoff g = cfg.payoff.make();

    json j;
    j["metadata"] = metadata(cfg, "solve");
    j["t"] = opt.t;
    j["x"] = x;

    if (opt.t > k.horizon() && opt.compose < 2) {
        throw HorizonError("t " + std::to_string(opt.t) + " exceeds the certified horizon " +
                               std::to_string(k.horizon()) +
                               "; pass --compose N to chain semigroup steps",
                           k.horizon());
    }

    if (cfg.method == "monte_carlo") {
        WeakResult r = weak_expectation(k, opt.t, x, g, cfg.monte_carlo, opt.seed);
        j["value"] = r.estimate;
        j["std_error"] = r.std_error;
        j["samples"] = cfg.monte_carlo.samples;
        j["seed"] = opt.seed;
        j["rng"] = "splitmix64+box-muller";
    } else if (opt.compose >= 2) {
        j["value"] = compose_solve(k, opt.t, opt.compose, x, g, cfg.quadrature,
                                   InterpOrder::quintic);
        j["compose"] = opt.compose;
    } else {
        j["value"] = cauchy_solve(k, opt.t, x, g, cfg.quadrature);
    }
    emit(j.dump(2), opt, output);
    return kExitOk;
}

int cmd_compose(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output) {
    if (opt.t1 <= 0.0 || opt.t2 <= 0.0)
        throw InputError("compose requires --t1 and --t2 > 0");
    std::vector<double> x = base_point_or_zero(cfg, opt.x);
    std::vector<double> y = base_point_or_zero(cfg, opt.y);
    KernelApprox k = kernel_from_config(cfg, y);
    json j;
    j["metadata"] = metadata(cfg, "compose");
    j["t1"] = opt.t1;
    j["t2"] = opt.t2;
    j["x"] = x;
    j["y"] = y;
    j["composed"] = semigroup_compose(k, opt.t1, opt.t2, x, y, cfg.quadrature);
    double total = opt.t1 + opt.t2;
    if (total <= k.horizon()) j["direct"] = k.eval_density(total, x);
    emit(j.dump(2), opt, output);
    return kExitOk;
}

int cmd_split_solve(const ProblemConfig& cfg, const CommandOptions& opt,
                    std::string* output) {
    if (!cfg.split) throw InputError("config has no 'split' section");
    const SplitSection& s = *cfg.split;

    BlockProblem problem;
    problem.n = cfg.dim;
    problem.d = s.diffusive_dim;
    if (s.diffusion)
        problem.diffusion = make_constant_diffusion(*s.diffusion, s.diffusive_dim);
    problem.drift_diffusive.assign(cfg.drift.begin(), cfg.drift.begin() + s.diffusive_dim);
    problem.drift_transport = s.transport_drift;
    auto bumps = s.initial;
    problem.initial = [bumps](std::span<const double> xq) {
        double acc = 0.0;
        for (const auto& b : bumps) acc += b(xq);
        return acc;
    };
    problem.T = s.T;

    SplitConfig scfg;
    scfg.rho = s.rho ? *s.rho : default_rho(problem);
    scfg.tau_step = s.tau_step;
    scfg.iterations = s.iterations;
    scfg.tol = s.tol;
    scfg.interp = s.interp_order == 5 ? InterpOrder::quintic : InterpOrder::cubic;
    scfg.quad = cfg.quadrature;
    scfg.expansion = cfg.expansion;
    scfg.form = cfg.form;

    TensorGrid grid = TensorGrid::uniform(s.grid_lo, s.grid_hi, s.grid_nodes);
    SplitReport report;
    GridState result = split_solve(problem, scfg, grid, &report);

    std::ostringstream csv;
    csv << "# command=split-solve\n";
    csv << "# config_hash=" << cfg.config_hash << "\n";
    csv << "# version=" << kVersion << "\n";
    csv << "# time=" << result.time << "\n";
    csv << "# rho=" << scfg.rho << " tau_step=" << scfg.tau_step << "\n";
    csv << "# steps=" << report.steps.size() << "\n";
    for (int a = 0; a < cfg.dim; ++a) csv << "x" << (a + 1) << ",";
    csv << "value\n";
    char buf[64];
    std::int64_t total = grid.size();
    for (std::int64_t i = 0; i < total; ++i) {
        std::vector<double> p = grid.point(i);
        for (double v : p) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            csv << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", result.values[i]);
        csv << buf << "\n";
    }
    emit(csv.str(), opt, output);
    return kExitOk;
}

namespace {

struct ValidationRow {
    std::string name;
    double observed;
    double tolerance;
    bool pass;
};

} // namespace

int cmd_validate(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output) {
    std::vector<ValidationRow> rows;
    auto add = [&rows](const std::string& name, double observed, double tol) {
        rows.push_back({name, observed, tol, observed <= tol});
    };

    // constant drift: expansion terminates and matches the exact kernel
    {
        std::vector<CoefficientField> drift{
            CoefficientField(PolyField(1, {{MultiIndex::zero(1), 1.0}}))};
        KernelApprox k(drift, std::nullopt, {0.4}, {.order = 2, .degree_cap = 6},
                       KernelForm::wkb_exponent, 1.0);
        double mu[1] = {1.0};
        double x[1] = {0.1}, y[1] = {0.4};
        double worst = 0.0;
        for (double t : {0.01, 0.1, 0.5}) {
            double got = k.eval_density(t, x);
            double want = oracle::exact_kernel(oracle::ExactKernelKind::constant_drift, t, x,
                                               y, mu);
            worst = std::max(worst, std::abs(got - want) / want);
        }
        add("constant-drift kernel vs exact", worst, 1e-10);
    }
    // free heat peak
    {
        std::vector<CoefficientField> drift{CoefficientField(PolyField(1, {}))};
        KernelApprox k(drift, std::nullopt, {0.0}, {.order = 0, .degree_cap = 2},
                       KernelForm::wkb_exponent, 10.0);
        double x[1] = {0.0};
        double got = k.eval_density(1.0, x);
        add("free-heat peak value", std::abs(got - std::pow(4.0 * M_PI, -0.5)), 1e-12);
    }
    // OU coefficient identities at y = 0.3
    {
        std::vector<CoefficientField> drift{
            CoefficientField(PolyField(1, {{MultiIndex::unit(1, 0), -1.0}}))};
        double yb = 0.3;
        WkbExpansion e = expand(drift, std::vector<double>{yb}, 0.0,
                                {.order = 1, .degree_cap = 6});
        auto c0 = e.c[0].by_power[0];
        auto c1 = e.c[1].by_power[0];
        double err = 0.0;
        err = std::max(err, std::abs(c0.coeff(MultiIndex::unit(1, 0)) - yb / 2.0));
        err = std::max(err, std::abs(c0.coeff(MultiIndex::unit(1, 0, 2)) - 0.25));
        err = std::max(err, std::abs(c1.coeff(MultiIndex::zero(1)) - (0.5 - yb * yb / 4.0)));
        err = std::max(err, std::abs(c1.coeff(MultiIndex::unit(1, 0)) + yb / 4.0));
        err = std::max(err, std::abs(c1.coeff(MultiIndex::unit(1, 0, 2)) + 1.0 / 12.0));
        add("OU c0/c1 closed forms", err, 1e-12);
    }
    // OU kernel against the exact density
    {
        std::vector<CoefficientField> drift{
            CoefficientField(PolyField(1, {{MultiIndex::unit(1, 0), -1.0}}))};
        KernelApprox k(drift, std::nullopt, {0.5}, {.order = 4, .degree_cap = 12},
                       KernelForm::wkb_exponent, 0.5);
        double x[1] = {0.2}, y[1] = {0.5};
        double t = 0.05;
        double got = k.eval_density(t, x);
        double want =
            oracle::exact_kernel(oracle::ExactKernelKind::ou_linear_drift, t, x, y);
        add("OU kernel vs exact (K=4, t=0.05)", std::abs(got - want) / want, 1e-6);
    }
    // normalization + semigroup
    {
        std::vector<CoefficientField> drift{
            CoefficientField(PolyField(1, {{MultiIndex::unit(1, 0), -1.0}}))};
        KernelApprox k(drift, std::nullopt, {0.1}, {.order = 6, .degree_cap = 14},
                       KernelForm::wkb_exponent, 0.5);
        double x[1] = {0.1};
        double norm = cauchy_solve(k, 0.05, x, [](std::span<const double>) { return 1.0; },
                                   {.nodes = 48, .window_sigmas = 10.0});
        add("OU normalization at t=0.05", std::abs(norm - 1.0), 1e-6);

        double xx[1] = {0.3}, yy[1] = {0.1};
        double comp = semigroup_compose(k, 0.1, 0.1, xx, yy,
                                        {.nodes = 48, .window_sigmas = 10.0});
        double direct = k.eval_density(0.2, xx);
        add("OU semigroup compose at t=0.2", std::abs(comp - direct) / direct, 1e-4);
    }
    // Euler-Maruyama vs exact OU mean
    {
        std::vector<CoefficientField> drift{
            CoefficientField(PolyField(1, {{MultiIndex::unit(1, 0), -1.0}}))};
        auto r = oracle::euler_maruyama_expectation(
            drift, identity_diffusion(1), std::vector<double>{1.0}, 1.0,
            [](std::span<const double> xq) { return xq[0]; }, 64, 20000, opt.seed + 17);
        double want = std::exp(-1.0);
        add("Euler-Maruyama OU mean (4 se)", std::abs(r.estimate - want),
            4.0 * r.std_error + 1e-3);
    }
    // Crank-Nicolson heat spreading
    {
        oracle::FdProblem p;
        p.n = 1;
        p.diffusion = {1.0};
        p.drift = {CoefficientField(PolyField(1, {}))};
        TensorGrid grid = TensorGrid::uniform(std::vector<double>{-7.0},
                                              std::vector<double>{7.0}, std::vector<int>{401});
        double v0 = 0.3, T = 0.25;
        GridState sol = oracle::crank_nicolson_solve(
            p, grid,
            [v0](std::span<const double> xq) {
                return std::exp(-xq[0] * xq[0] / (2.0 * v0));
            },
            2e-4, T);
        double vT = v0 + 2.0 * T;
        double worst = 0.0;
        for (std::int64_t i = 0; i < grid.size(); ++i) {
            double xq = grid.axes[0][i];
            double want = std::sqrt(v0 / vT) * std::exp(-xq * xq / (2.0 * vT));
            worst = std::max(worst, std::abs(sol.values[i] - want));
        }
        add("Crank-Nicolson heat Gaussian", worst, 1e-4);
    }

    std::ostringstream table;
    bool all_pass = true;
    table << "validation suite (config " << cfg.config_hash << ", version " << kVersion
          << ")\n";
    for (const auto& r : rows) {
        all_pass = all_pass && r.pass;
        char line[160];
        std::snprintf(line, sizeof(line), "%-38s %10.3e <= %8.1e  %s", r.name.c_str(),
                      r.observed, r.tolerance, r.pass ? "PASS" : "FAIL");
        table << line << "\n";
    }
    table << (all_pass ? "all rows passed" : "validation FAILED") << "\n";
    emit(table.str(), opt, output);
    return all_pass ? kExitOk : kExitValidation;
}

int run_command(const std::string& command, const CommandOptions& opt, std::string* output) {
    try {
        ProblemConfig cfg = load_config(opt.config_path);
        if (command == "expand") return cmd_expand(cfg, opt, output);
        if (command == "horizon") return cmd_horizon(cfg, opt, output);
        if (command == "solve") return cmd_solve(cfg, opt, output);
        if (command == "compose") return cmd_compose(cfg, opt, output);
        if (command == "split-solve") return cmd_split_solve(cfg, opt, output);
        if (command == "validate") return cmd_validate(cfg, opt, output);
        throw InputError("unknown command '" + command + "'");
    } catch (const HorizonError& e) {
        std::cerr << "horizon violation: " << e.what() << "\n";
        return kExitHorizon;
    } catch (const InputError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace parex
