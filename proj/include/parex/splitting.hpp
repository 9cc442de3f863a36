#pragma once

#include <functional>
#include <optional>

#include "parex/grid.hpp"
#include "parex/kernel.hpp"

namespace parex {

/// Block semi-elliptic Cauchy problem: second-order diffusion on the first
/// d coordinates, first-order transport on the remaining n-d. Drift fields
/// may depend on all coordinates (that dependence is what couples the
/// blocks).
struct BlockProblem {
    int n = 2;
    int d = 1;
    std::optional<ConstantDiffusion> diffusion;       ///< d x d block, identity if absent
    std::vector<CoefficientField> drift_diffusive;   ///< mu_1..mu_d, n-dim fields
    std::vector<CoefficientField> drift_transport;   ///< mu_{d+1}..mu_n, n-dim fields
    std::function<double(std::span<const double>)> initial;
    double T = 1.0;

    void validate() const;
};

struct SplitConfig {
    double rho = 0.5;       ///< time dilatation factor, 0 < rho <= 1
    double tau_step = 0.1;  ///< substep length in dilated time
    int iterations = 3;     ///< max delta-u corrections per step
    double tol = 1e-8;      ///< max-norm stopping tolerance for corrections
    InterpOrder interp = InterpOrder::cubic;
    int rk_substeps = 8;    ///< RK4 substeps per dt along characteristics
    QuadratureSpec quad;
    ExpandOptions expansion;
    KernelForm form = KernelForm::wkb_exponent;

    void validate() const;
    double dt() const { return rho * tau_step; }
};

/// Source term g(s, x) of one substep, known on the grid at the step
/// endpoints (the trapezoid rule needs no more).
struct StepSource {
    std::vector<double> at_start;
    std::vector<double> at_end;
};

struct StepStats {
    std::vector<double> delta_norms;
    std::int64_t boundary_warnings = 0;
};

/// Transport along the flow of sum_{i>d} mu_i d/dx_i with the diffusive
/// coordinates frozen: characteristics by RK4, values by tensor
/// interpolation, source by the trapezoid rule along the characteristic.
GridState vector_field_step(const GridState& state, const BlockProblem& problem, double dt,
                            const StepSource* source, const SplitConfig& cfg,
                            std::int64_t* boundary_warnings = nullptr);

/// Kernel smoothing of each diffusive slice (transport coordinates frozen
/// as parameters), source added by one trapezoid step.
GridState diffusion_step(const GridState& state, const BlockProblem& problem, double dt,
                         const StepSource* source, const SplitConfig& cfg,
                         std::int64_t* boundary_warnings = nullptr);

/// One alternating-direction step over dilated time tau_step (physical
/// time rho * tau_step): startup transport pass, then alternating
/// diffusion/transport solves feeding each other's previous iterate as
/// source, accumulated through the delta-u corrections.
GridState ad_step(const GridState& state, const BlockProblem& problem, const SplitConfig& cfg,
                  StepStats* stats = nullptr);

struct SplitReport {
    std::vector<StepStats> steps;
};

GridState split_solve(const BlockProblem& problem, const SplitConfig& cfg,
                      const TensorGrid& grid, SplitReport* report = nullptr);

/// Default dilatation factor: half of the certified safe step for the
/// diffusive-block drift (1/2 when the bound is vacuous).
double default_rho(const BlockProblem& problem);

} // namespace parex
