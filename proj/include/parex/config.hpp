#pragma once

#include <optional>
#include <string>

#include "parex/splitting.hpp"

namespace parex {

/// Sum-of-Gaussian-bumps initial data / payoff shape, restricted to a
/// subset of axes: a * exp(-sum_i (x_{axes[i]} - center[i])^2 / (2 w_i^2)).
struct BumpSpec {
    std::vector<int> axes;
    std::vector<double> center;
    std::vector<double> width;
    double amplitude = 1.0;

    double operator()(std::span<const double> x) const;
};

struct PayoffSpec {
    enum class Kind { one, coordinate, square, indicator_above, bumps };
    Kind kind = Kind::one;
    int axis = 0;
    double threshold = 0.0;
    std::vector<BumpSpec> bumps;

    Payoff make() const;
};

struct SplitSection {
    int diffusive_dim = 1;
    std::optional<std::vector<double>> diffusion;  ///< d*d row-major
    std::vector<CoefficientField> transport_drift;
    std::vector<double> grid_lo, grid_hi;
    std::vector<int> grid_nodes;
    std::vector<BumpSpec> initial;
    double T = 1.0;
    std::optional<double> rho;
    double tau_step = 0.1;
    int iterations = 3;
    double tol = 1e-8;
    int interp_order = 3;
};

/// One JSON document drives every command; CLI flags only select command,
/// base points, times and seed. Unknown keys are rejected.
struct ProblemConfig {
    int dim = 1;
    std::vector<CoefficientField> drift;
    std::optional<std::vector<double>> diffusion;  ///< n*n row-major
    double domain_radius = 1.0;
    ExpandOptions expansion;
    KernelForm form = KernelForm::wkb_exponent;
    std::optional<double> horizon_override;
    QuadratureSpec quadrature;
    MonteCarloSpec monte_carlo;
    std::string method = "quadrature";  ///< "quadrature" or "monte_carlo"
    PayoffSpec payoff;
    std::optional<SplitSection> split;
    std::string config_hash;

    /// Certified (or overridden) horizon for kernel construction. Throws
    /// InputError when no certified bound exists and no override is given.
    double resolve_horizon() const;
};

ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config_text(const std::string& text);

std::string expansion_to_json_text(const WkbExpansion& e);
WkbExpansion expansion_from_json_text(const std::string& text);

std::string config_hash_of(const std::string& text);

} // namespace parex
