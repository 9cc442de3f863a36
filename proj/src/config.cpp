#include "parex/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace parex {

using nlohmann::json;

double BumpSpec::operator()(std::span<const double> x) const {
    double q = 0.0;
    for (size_t i = 0; i < axes.size(); ++i) {
        double d = x[axes[i]] - center[i];
        q += d * d / (2.0 * width[i] * width[i]);
    }
    return amplitude * std::exp(-q);
}

Payoff PayoffSpec::make() const {
    switch (kind) {
        case Kind::one:
            return [](std::span<const double>) { return 1.0; };
        case Kind::coordinate: {
            int a = axis;
            return [a](std::span<const double> x) { return x[a]; };
        }
        case Kind::square: {
            int a = axis;
            return [a](std::span<const double> x) { return x[a] * x[a]; };
        }
        case Kind::indicator_above: {
            int a = axis;
            double thr = threshold;
            return [a, thr](std::span<const double> x) { return x[a] > thr ? 1.0 : 0.0; };
        }
        case Kind::bumps: {
            auto copy = bumps;
            return [copy](std::span<const double> x) {
                double acc = 0.0;
                for (const auto& b : copy) acc += b(x);
                return acc;
            };
        }
    }
    throw InputError("PayoffSpec: unknown kind");
}

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
    throw InputError("config error at '" + where + "': " + what);
}

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!j.is_object()) config_error(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) config_error(where, "unknown key '" + it.key() + "'");
}

CoefficientField parse_field(const json& j, int dim, const std::string& where) {
    require_keys(j, where, {"type", "terms", "coeffs", "growth_bound"});
    std::string type = j.at("type").get<std::string>();
    std::optional<double> bound;
    if (j.contains("growth_bound")) bound = j.at("growth_bound").get<double>();
    if (type == "fourier") {
        if (!j.contains("terms")) config_error(where, "fourier field needs 'terms'");
        std::vector<FourierTerm> terms;
        for (const auto& tj : j.at("terms")) {
            require_keys(tj, where + ".terms[]", {"freq", "sin", "cos"});
            FourierTerm t;
            for (const auto& v : tj.at("freq")) {
                if (!v.is_number_integer())
                    config_error(where, "fourier frequencies must be integers");
                t.freq.push_back(v.get<double>());
            }
            if (static_cast<int>(t.freq.size()) != dim + 1)
                config_error(where, "frequency vector must have length dim+1");
            if (tj.contains("sin")) t.sin_coeff = tj.at("sin").get<double>();
            if (tj.contains("cos")) t.cos_coeff = tj.at("cos").get<double>();
            terms.push_back(std::move(t));
        }
        return CoefficientField(FourierField(dim, std::move(terms)), bound);
    }
    if (type == "poly") {
        if (!j.contains("coeffs")) config_error(where, "poly field needs 'coeffs'");
        std::map<MultiIndex, double> coeffs;
        for (const auto& cj : j.at("coeffs")) {
            require_keys(cj, where + ".coeffs[]", {"gamma", "value"});
            std::vector<int> g = cj.at("gamma").get<std::vector<int>>();
            if (static_cast<int>(g.size()) != dim)
                config_error(where, "gamma must have length dim");
            coeffs[MultiIndex(std::move(g))] += cj.at("value").get<double>();
        }
        return CoefficientField(PolyField(dim, std::move(coeffs)), bound);
    }
    config_error(where, "field type must be 'fourier' or 'poly'");
}

BumpSpec parse_bump(const json& j, int dim, const std::string& where) {
    require_keys(j, where, {"type", "axes", "center", "width", "amplitude"});
    if (j.contains("type") && j.at("type").get<std::string>() != "gaussian")
        config_error(where, "only gaussian bumps are supported");
    BumpSpec b;
    if (j.contains("axes"))
        b.axes = j.at("axes").get<std::vector<int>>();
    else
        for (int i = 0; i < dim; ++i) b.axes.push_back(i);
    b.center = j.at("center").get<std::vector<double>>();
    if (j.at("width").is_array())
        b.width = j.at("width").get<std::vector<double>>();
    else
        b.width.assign(b.axes.size(), j.at("width").get<double>());
    if (j.contains("amplitude")) b.amplitude = j.at("amplitude").get<double>();
    if (b.center.size() != b.axes.size() || b.width.size() != b.axes.size())
        config_error(where, "axes/center/width sizes disagree");
    for (int a : b.axes)
        if (a < 0 || a >= dim) config_error(where, "bump axis out of range");
    for (double w : b.width)
        if (w <= 0.0) config_error(where, "bump width must be > 0");
    return b;
}

PayoffSpec parse_payoff(const json& j, int dim, const std::string& where) {
    require_keys(j, where, {"type", "axis", "threshold", "bumps"});
    PayoffSpec p;
    std::string type = j.at("type").get<std::string>();
    if (type == "one")
        p.kind = PayoffSpec::Kind::one;
    else if (type == "coordinate")
        p.kind = PayoffSpec::Kind::coordinate;
    else if (type == "square")
        p.kind = PayoffSpec::Kind::square;
    else if (type == "indicator_above")
        p.kind = PayoffSpec::Kind::indicator_above;
    else if (type == "bumps")
        p.kind = PayoffSpec::Kind::bumps;
    else
        config_error(where, "unknown payoff type '" + type + "'");
    if (j.contains("axis")) p.axis = j.at("axis").get<int>();
    if (p.axis < 0 || p.axis >= dim) config_error(where, "payoff axis out of range");
    if (j.contains("threshold")) p.threshold = j.at("threshold").get<double>();
    if (j.contains("bumps"))
        for (const auto& bj : j.at("bumps")) p.bumps.push_back(parse_bump(bj, dim, where));
    return p;
}

} // namespace

ProblemConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config error: invalid JSON: ") + e.what());
    }
    require_keys(j, "$",
                 {"dim", "drift", "diffusion", "domain_radius", "expansion", "form",
                  "horizon", "quadrature", "monte_carlo", "method", "payoff", "split"});
    ProblemConfig cfg;
    cfg.config_hash = config_hash_of(text);
    if (!j.contains("dim")) config_error("$", "missing required key 'dim'");
    cfg.dim = j.at("dim").get<int>();
    if (cfg.dim < 1) config_error("dim", "must be >= 1");

    if (j.contains("drift")) {
        int i = 0;
        for (const auto& fj : j.at("drift"))
            cfg.drift.push_back(parse_field(fj, cfg.dim, "drift[" + std::to_string(i++) + "]"));
    }
    if (static_cast<int>(cfg.drift.size()) != cfg.dim && !cfg.drift.empty())
        config_error("drift", "need one field per dimension");
    if (cfg.drift.empty())
        for (int i = 0; i < cfg.dim; ++i)
            cfg.drift.emplace_back(PolyField(cfg.dim, {}));

    if (j.contains("diffusion")) {
        std::vector<double> flat;
        for (const auto& row : j.at("diffusion"))
            for (const auto& v : row) flat.push_back(v.get<double>());
        if (static_cast<int>(flat.size()) != cfg.dim * cfg.dim)
            config_error("diffusion", "matrix must be dim x dim");
        cfg.diffusion = std::move(flat);
    }
    if (j.contains("domain_radius")) {
        cfg.domain_radius = j.at("domain_radius").get<double>();
        if (cfg.domain_radius <= 0.0) config_error("domain_radius", "must be > 0");
    }
    if (j.contains("expansion")) {
        const auto& ej = j.at("expansion");
        require_keys(ej, "expansion",
                     {"order", "degree_cap", "time_inhomogeneous", "time_power_cap"});
        if (ej.contains("order")) cfg.expansion.order = ej.at("order").get<int>();
        if (ej.contains("degree_cap"))
            cfg.expansion.degree_cap = ej.at("degree_cap").get<int>();
        if (ej.contains("time_inhomogeneous"))
            cfg.expansion.time_inhomogeneous = ej.at("time_inhomogeneous").get<bool>();
        if (ej.contains("time_power_cap"))
            cfg.expansion.time_power_cap = ej.at("time_power_cap").get<int>();
        if (cfg.expansion.order < 0) config_error("expansion.order", "must be >= 0");
    }
    if (j.contains("form")) {
        std::string f = j.at("form").get<std::string>();
        if (f == "wkb_exponent")
            cfg.form = KernelForm::wkb_exponent;
        else if (f == "d_series")
            cfg.form = KernelForm::d_series;
        else
            config_error("form", "must be 'wkb_exponent' or 'd_series'");
    }
    if (j.contains("horizon")) {
        cfg.horizon_override = j.at("horizon").get<double>();
        if (*cfg.horizon_override <= 0.0) config_error("horizon", "must be > 0");
    }
    if (j.contains("quadrature")) {
        const auto& qj = j.at("quadrature");
        require_keys(qj, "quadrature", {"nodes", "window_sigmas"});
        if (qj.contains("nodes")) cfg.quadrature.nodes = qj.at("nodes").get<int>();
        if (qj.contains("window_sigmas"))
            cfg.quadrature.window_sigmas = qj.at("window_sigmas").get<double>();
        if (cfg.quadrature.nodes < 2 || cfg.quadrature.window_sigmas <= 0.0)
            config_error("quadrature", "bad quadrature spec");
    }
    if (j.contains("monte_carlo")) {
        const auto& mj = j.at("monte_carlo");
        require_keys(mj, "monte_carlo", {"samples", "chunk"});
        if (mj.contains("samples"))
            cfg.monte_carlo.samples = mj.at("samples").get<std::int64_t>();
        if (mj.contains("chunk")) cfg.monte_carlo.chunk = mj.at("chunk").get<std::int64_t>();
        if (cfg.monte_carlo.samples < 1 || cfg.monte_carlo.chunk < 1)
            config_error("monte_carlo", "bad sample counts");
    }
    if (j.contains("method")) {
        cfg.method = j.at("method").get<std::string>();
        if (cfg.method != "quadrature" && cfg.method != "monte_carlo")
            config_error("method", "must be 'quadrature' or 'monte_carlo'");
    }
    if (j.contains("payoff")) cfg.payoff = parse_payoff(j.at("payoff"), cfg.dim, "payoff");

    if (j.contains("split")) {
        const auto& sj = j.at("split");
        require_keys(sj, "split",
                     {"diffusive_dim", "diffusion", "transport_drift", "grid", "initial",
                      "T", "rho", "tau_step", "iterations", "tol", "interp_order"});
        SplitSection s;
        s.diffusive_dim = sj.at("diffusive_dim").get<int>();
        if (s.diffusive_dim < 1 || s.diffusive_dim > cfg.dim)
            config_error("split.diffusive_dim", "need 1 <= d <= dim");
        if (sj.contains("diffusion")) {
            std::vector<double> flat;
            for (const auto& row : sj.at("diffusion"))
                for (const auto& v : row) flat.push_back(v.get<double>());
            int d = s.diffusive_dim;
            if (static_cast<int>(flat.size()) != d * d)
                config_error("split.diffusion", "matrix must be d x d");
            s.diffusion = std::move(flat);
        }
        int i = 0;
        if (sj.contains("transport_drift"))
            for (const auto& fj : sj.at("transport_drift"))
                s.transport_drift.push_back(
                    parse_field(fj, cfg.dim, "split.transport_drift[" + std::to_string(i++) + "]"));
        if (static_cast<int>(s.transport_drift.size()) != cfg.dim - s.diffusive_dim)
            config_error("split.transport_drift", "need one field per transport axis");
        const auto& gj = sj.at("grid");
        require_keys(gj, "split.grid", {"lo", "hi", "nodes"});
        s.grid_lo = gj.at("lo").get<std::vector<double>>();
        s.grid_hi = gj.at("hi").get<std::vector<double>>();
        s.grid_nodes = gj.at("nodes").get<std::vector<int>>();
        if (static_cast<int>(s.grid_lo.size()) != cfg.dim ||
            static_cast<int>(s.grid_hi.size()) != cfg.dim ||
            static_cast<int>(s.grid_nodes.size()) != cfg.dim)
            config_error("split.grid", "axis specs must have length dim");
        for (const auto& bj : sj.at("initial"))
            s.initial.push_back(parse_bump(bj, cfg.dim, "split.initial[]"));
        s.T = sj.at("T").get<double>();
        if (s.T <= 0.0) config_error("split.T", "must be > 0");
        if (sj.contains("rho")) s.rho = sj.at("rho").get<double>();
        if (sj.contains("tau_step")) s.tau_step = sj.at("tau_step").get<double>();
        if (sj.contains("iterations")) s.iterations = sj.at("iterations").get<int>();
        if (sj.contains("tol")) s.tol = sj.at("tol").get<double>();
        if (sj.contains("interp_order")) {
            s.interp_order = sj.at("interp_order").get<int>();
            if (s.interp_order != 3 && s.interp_order != 5)
                config_error("split.interp_order", "must be 3 (cubic) or 5 (quintic)");
        }
        cfg.split = std::move(s);
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config error: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

double ProblemConfig::resolve_horizon() const {
    if (horizon_override) return *horizon_override;
    bool fourier = true;
    for (const auto& f : drift)
        if (!f.is_fourier()) fourier = false;
    if (!fourier)
        throw InputError(
            "no certified horizon for polynomial drift; set 'horizon' in the config "
            "and check convergence with --diagnose");
    FourierBounds fb = fourier_bounds(drift);
    HorizonParams hp;
    hp.n = dim;
    hp.abs_m0 = fb.abs_m0;
    hp.ebar = fb.ebar;
    hp.R = domain_radius;
    hp.variable_diffusion = diffusion.has_value();
    HorizonBound hb = beta_lower_bound(hp);
    if (hb.drift_free) return std::numeric_limits<double>::infinity();
    return 0.9 * hb.beta;
}

std::string expansion_to_json_text(const WkbExpansion& e) {
    json j;
    j["y"] = e.base_point;
    j["K"] = e.order;
    j["D"] = e.degree_cap;
    j["t0"] = e.t0;
    j["time_inhomogeneous"] = e.time_inhomogeneous;
    j["truncation_report"] = e.truncation_report;
    json ctab = json::array();
    for (const auto& ck : e.c) {
        json terms = json::array();
        for (int l = 0; l < static_cast<int>(ck.by_power.size()); ++l) {
            for (const auto& [g, v] : ck.by_power[l].coeffs()) {
                json term;
                term["gamma"] = g.exponents;
                term["l"] = l;
                term["value"] = v;
                terms.push_back(std::move(term));
            }
        }
        ctab.push_back(std::move(terms));
    }
    j["c"] = std::move(ctab);
    return j.dump(2);
}

WkbExpansion expansion_from_json_text(const std::string& text) {
    json j = json::parse(text);
    WkbExpansion e;
    e.base_point = j.at("y").get<std::vector<double>>();
    e.order = j.at("K").get<int>();
    e.degree_cap = j.at("D").get<int>();
    e.t0 = j.value("t0", 0.0);
    e.time_inhomogeneous = j.value("time_inhomogeneous", false);
    if (j.contains("truncation_report"))
        e.truncation_report = j.at("truncation_report").get<std::vector<std::int64_t>>();
    int n = static_cast<int>(e.base_point.size());
    for (const auto& terms : j.at("c")) {
        TimePoly ck = TimePoly::zero(n, e.base_point, e.degree_cap);
        for (const auto& term : terms) {
            int l = term.at("l").get<int>();
            std::vector<int> g = term.at("gamma").get<std::vector<int>>();
            ck.grow(l);
            ck.by_power[l].accumulate(MultiIndex(std::move(g)),
                                      term.at("value").get<double>());
        }
        e.c.push_back(std::move(ck));
    }
    if (static_cast<int>(e.c.size()) != e.order + 1)
        throw InputError("expansion JSON: c table size != K+1");
    return e;
}

std::string config_hash_of(const std::string& text) {
    // FNV-1a 64
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace parex
