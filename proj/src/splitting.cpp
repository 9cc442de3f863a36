#include "parex/splitting.hpp"

#include <algorithm>
#include <cmath>

#include "parex/horizon.hpp"

namespace parex {

void BlockProblem::validate() const {
    if (n < 1 || d < 1 || d > n) throw InputError("BlockProblem: need 1 <= d <= n");
    if (static_cast<int>(drift_diffusive.size()) != d)
        throw InputError("BlockProblem: expected d diffusive drift fields");
    if (static_cast<int>(drift_transport.size()) != n - d)
        throw InputError("BlockProblem: expected n-d transport drift fields");
    for (const auto& f : drift_diffusive)
        if (f.dim() != n) throw InputError("BlockProblem: diffusive drift field dim != n");
    for (const auto& f : drift_transport)
        if (f.dim() != n) throw InputError("BlockProblem: transport drift field dim != n");
    if (diffusion && diffusion->n != d)
        throw InputError("BlockProblem: diffusion block must be d x d");
    if (!initial) throw InputError("BlockProblem: missing initial data");
    if (T <= 0.0) throw InputError("BlockProblem: T must be > 0");
}

void SplitConfig::validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw InputError("SplitConfig: need 0 < rho <= 1");
    if (tau_step <= 0.0) throw InputError("SplitConfig: tau_step must be > 0");
    if (iterations < 1) throw InputError("SplitConfig: iterations must be >= 1");
    if (tol <= 0.0) throw InputError("SplitConfig: tol must be > 0");
    if (rk_substeps < 1) throw InputError("SplitConfig: rk_substeps must be >= 1");
}

double default_rho(const BlockProblem& problem) {
    bool fourier = true;
    for (const auto& f : problem.drift_diffusive)
        if (!f.is_fourier()) fourier = false;
    if (fourier && !problem.drift_diffusive.empty()) {
        try {
            FourierBounds fb = fourier_bounds(problem.drift_diffusive);
            HorizonParams hp;
            hp.n = problem.d;
            hp.abs_m0 = fb.abs_m0;
            hp.ebar = fb.ebar;
            hp.R = 1.0;
            HorizonBound hb = beta_lower_bound(hp);
            if (!hb.drift_free) return std::min(1.0, 0.9 * hb.beta) / 2.0;
        } catch (const InputError&) {
        }
    }
    return 0.5;
}

namespace {

// flow of the transport vector field over time dt, diffusive coordinates
// frozen; advances the transport components of `pt` in place
void flow_transport(const BlockProblem& problem, std::vector<double>& pt, double dt,
                    int substeps) {
    int n = problem.n, d = problem.d;
    int m = n - d;
    if (m == 0) return;
    double h = dt / substeps;
    std::vector<double> k1(m), k2(m), k3(m), k4(m);
    std::vector<double> work(pt);
    auto eval = [&](const std::vector<double>& q, std::vector<double>& out) {
        for (int i = 0; i < m; ++i) out[i] = evaluate_field(problem.drift_transport[i], 0.0, q);
    };
    for (int s = 0; s < substeps; ++s) {
        eval(pt, k1);
        for (int i = 0; i < m; ++i) work[d + i] = pt[d + i] + 0.5 * h * k1[i];
        eval(work, k2);
        for (int i = 0; i < m; ++i) work[d + i] = pt[d + i] + 0.5 * h * k2[i];
        eval(work, k3);
        for (int i = 0; i < m; ++i) work[d + i] = pt[d + i] + h * k3[i];
        eval(work, k4);
        for (int i = 0; i < m; ++i)
            pt[d + i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

std::vector<double> combined_with_source(const GridState& state, const StepSource* source,
                                         double dt) {
    if (!source) return state.values;
    if (source->at_start.size() != state.values.size() ||
        source->at_end.size() != state.values.size())
        throw InputError("StepSource: array size does not match grid");
    std::vector<double> base(state.values.size());
    for (size_t i = 0; i < base.size(); ++i)
        base[i] = state.values[i] + 0.5 * dt * source->at_start[i];
    return base;
}

} // namespace

GridState vector_field_step(const GridState& state, const BlockProblem& problem, double dt,
                            const StepSource* source, const SplitConfig& cfg,
                            std::int64_t* boundary_warnings) {
    problem.validate();
    state.validate();
    if (dt <= 0.0) throw InputError("vector_field_step: dt must be > 0");
    if (state.grid.dim() != problem.n)
        throw InputError("vector_field_step: grid dimension != problem dimension");

    std::vector<double> base = combined_with_source(state, source, dt);
    GridInterpolator interp(state.grid, base, cfg.interp);

    GridState out;
    out.grid = state.grid;
    out.values.resize(state.values.size());
    out.time = state.time + dt;

    std::int64_t total = state.grid.size();
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::vector<double> pt = state.grid.point(flat);
        flow_transport(problem, pt, dt, cfg.rk_substeps);
        double v = interp(pt);
        if (source) v += 0.5 * dt * source->at_end[flat];
        out.values[flat] = v;
    }
    if (boundary_warnings) *boundary_warnings += interp.clamp_count();
    return out;
}

GridState diffusion_step(const GridState& state, const BlockProblem& problem, double dt,
                         const StepSource* source, const SplitConfig& cfg,
                         std::int64_t* boundary_warnings) {
    problem.validate();
    state.validate();
    if (dt <= 0.0) throw InputError("diffusion_step: dt must be > 0");
    int n = problem.n, d = problem.d;
    if (d > 3) throw InputError("diffusion_step: diffusive block must have d <= 3");
    if (state.grid.dim() != n)
        throw InputError("diffusion_step: grid dimension != problem dimension");

    // certified horizon check for Fourier diffusive drifts
    bool fourier = !problem.drift_diffusive.empty();
    for (const auto& f : problem.drift_diffusive)
        if (!f.is_fourier()) fourier = false;
    if (fourier) {
        FourierBounds fb = fourier_bounds(problem.drift_diffusive);
        HorizonParams hp;
        hp.n = d;
        hp.abs_m0 = fb.abs_m0;
        hp.ebar = fb.ebar;
        double span = 0.0;
        for (int a = 0; a < d; ++a)
            span = std::max(span, std::max(std::abs(state.grid.axes[a].front()),
                                           std::abs(state.grid.axes[a].back())));
        hp.R = std::max(span, 1e-6);
        HorizonBound hb = beta_lower_bound(hp);
        if (!hb.drift_free && dt > 0.9 * hb.beta)
            throw HorizonError("diffusion_step: dt " + std::to_string(dt) +
                                   " exceeds 0.9 * certified horizon " +
                                   std::to_string(hb.beta) + "; reduce dt or rho",
                               hb.beta);
    }

    std::vector<double> base = combined_with_source(state, source, dt);

    // d-dimensional sub-grid of the diffusive axes
    TensorGrid slice_grid;
    slice_grid.axes.assign(state.grid.axes.begin(), state.grid.axes.begin() + d);
    std::int64_t slice_size = slice_grid.size();

    std::vector<int> keep(d);
    for (int i = 0; i < d; ++i) keep[i] = i;

    GridState out;
    out.grid = state.grid;
    out.values.resize(state.values.size());
    out.time = state.time + dt;

    // iterate over transport-coordinate combinations
    std::vector<int> tshape;
    for (int a = d; a < n; ++a) tshape.push_back(static_cast<int>(state.grid.axes[a].size()));
    std::int64_t slices = 1;
    for (int s : tshape) slices *= s;

    std::vector<double> slice_values(slice_size);
    std::vector<int> full_idx(n, 0);
    std::int64_t clamp_total = 0;

    for (std::int64_t sl = 0; sl < slices; ++sl) {
        // decode transport indices
        std::int64_t rem = sl;
        for (int a = n - 1; a >= d; --a) {
            int count = static_cast<int>(state.grid.axes[a].size());
            full_idx[a] = static_cast<int>(rem % count);
            rem /= count;
        }
        std::vector<double> frozen_pt(n, 0.0);
        for (int a = d; a < n; ++a) frozen_pt[a] = state.grid.axes[a][full_idx[a]];

        // gather the slice
        for (std::int64_t i = 0; i < slice_size; ++i) {
            auto didx = slice_grid.unflatten(i);
            for (int a = 0; a < d; ++a) full_idx[a] = didx[a];
            slice_values[i] = base[state.grid.flatten(full_idx)];
        }

        std::vector<CoefficientField> frozen_drift;
        frozen_drift.reserve(d);
        for (const auto& f : problem.drift_diffusive)
            frozen_drift.push_back(freeze(f, keep, frozen_pt));

        KernelApprox model(frozen_drift, problem.diffusion, std::vector<double>(d, 0.0),
                           cfg.expansion, cfg.form, dt);

        GridInterpolator slice_interp(slice_grid, slice_values, cfg.interp);
        Payoff payoff = [&](std::span<const double> y) { return slice_interp(y); };

        for (std::int64_t i = 0; i < slice_size; ++i) {
            auto didx = slice_grid.unflatten(i);
            for (int a = 0; a < d; ++a) full_idx[a] = didx[a];
            std::int64_t flat = state.grid.flatten(full_idx);
            std::vector<double> xd = slice_grid.point(didx);
            double v = cauchy_solve(model, dt, xd, payoff, cfg.quad);
            if (source) v += 0.5 * dt * source->at_end[flat];
            out.values[flat] = v;
        }
        clamp_total += slice_interp.clamp_count();
    }
    if (boundary_warnings) *boundary_warnings += clamp_total;
    return out;
}

namespace {

// sum_{i>d} mu_i(x) d/dx_i v on the grid
std::vector<double> transport_source(const BlockProblem& problem, const TensorGrid& grid,
                                     std::span<const double> v) {
    std::vector<double> out(v.size(), 0.0);
    for (int a = problem.d; a < problem.n; ++a) {
        std::vector<double> dv = grid_partial(grid, v, a);
        const auto& field = problem.drift_transport[a - problem.d];
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(out.size()); ++i) {
            std::vector<double> pt = grid.point(i);
            out[i] += evaluate_field(field, 0.0, pt) * dv[i];
        }
    }
    return out;
}

// sum_{ij<=d} a*_ij d2v/dxi dxj + sum_{i<=d} mu_i(x) dv/dx_i on the grid
std::vector<double> diffusive_source(const BlockProblem& problem, const TensorGrid& grid,
                                     std::span<const double> v) {
    int d = problem.d;
    std::vector<double> out(v.size(), 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double a = problem.diffusion ? problem.diffusion->A[i * d + j]
                                         : (i == j ? 1.0 : 0.0);
            if (a == 0.0) continue;
            std::vector<double> second;
            if (i == j) {
                second = grid_second_partial(grid, v, i);
            } else {
                std::vector<double> first = grid_partial(grid, v, j);
                second = grid_partial(grid, first, i);
            }
            for (std::int64_t m = 0; m < static_cast<std::int64_t>(out.size()); ++m)
                out[m] += a * second[m];
        }
    }
    for (int i = 0; i < d; ++i) {
        const auto& field = problem.drift_diffusive[i];
        if (field.is_zero()) continue;
        std::vector<double> dv = grid_partial(grid, v, i);
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(out.size()); ++m) {
            std::vector<double> pt = grid.point(m);
            out[m] += evaluate_field(field, 0.0, pt) * dv[m];
        }
    }
    return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

GridState ad_step(const GridState& state, const BlockProblem& problem, const SplitConfig& cfg,
                  StepStats* stats) {
    problem.validate();
    cfg.validate();
    double dt = cfg.dt();
    std::int64_t warnings = 0;

    // u^0: pure transport of the step's initial data
    GridState u_even = vector_field_step(state, problem, dt, nullptr, cfg, &warnings);

    // u^1: diffusion with the transport term of u^0 as source
    StepSource src;
    src.at_start = transport_source(problem, state.grid, state.values);
    src.at_end = transport_source(problem, state.grid, u_even.values);
    GridState u_odd = diffusion_step(state, problem, dt, &src, cfg, &warnings);

    std::vector<double> delta_norms;
    double prev_delta = std::numeric_limits<double>::infinity();
    int growth_streak = 0;

    for (int l = 1; l < cfg.iterations; ++l) {
        StepSource vf_src;
        vf_src.at_start = diffusive_source(problem, state.grid, state.values);
        vf_src.at_end = diffusive_source(problem, state.grid, u_odd.values);
        GridState next_even = vector_field_step(state, problem, dt, &vf_src, cfg, &warnings);

        StepSource diff_src;
        diff_src.at_start = transport_source(problem, state.grid, state.values);
        diff_src.at_end = transport_source(problem, state.grid, next_even.values);
        GridState next_odd = diffusion_step(state, problem, dt, &diff_src, cfg, &warnings);

        double delta = max_abs_diff(next_odd.values, u_odd.values);
        delta_norms.push_back(delta);
        u_even = std::move(next_even);
        u_odd = std::move(next_odd);

        if (delta > prev_delta && delta > cfg.tol) {
            if (++growth_streak >= 2)
                throw DivergenceError(
                    "ad_step: correction norms are growing; reduce rho (delta " +
                    std::to_string(delta) + ")");
        } else {
            growth_streak = 0;
        }
        prev_delta = delta;
        if (delta < cfg.tol) break;
    }

    u_odd.time = state.time + dt;
    if (stats) {
        stats->delta_norms = std::move(delta_norms);
        stats->boundary_warnings = warnings;
    }
    return u_odd;
}

GridState split_solve(const BlockProblem& problem, const SplitConfig& cfg,
                      const TensorGrid& grid, SplitReport* report) {
    problem.validate();
    cfg.validate();
    GridState state;
    state.grid = grid;
    state.time = 0.0;
    std::int64_t total = grid.size();
    state.values.resize(total);
    for (std::int64_t i = 0; i < total; ++i) state.values[i] = problem.initial(grid.point(i));
    state.validate();

    double dt = cfg.dt();
    int steps = static_cast<int>(std::ceil(problem.T / dt - 1e-9));
    for (int s = 0; s < steps; ++s) {
        double remaining = problem.T - state.time;
        SplitConfig step_cfg = cfg;
        if (remaining < dt) step_cfg.tau_step = remaining / cfg.rho;
        StepStats stats;
        state = ad_step(state, problem, step_cfg, &stats);
        if (report) report->steps.push_back(std::move(stats));
    }
    return state;
}

} // namespace parex
