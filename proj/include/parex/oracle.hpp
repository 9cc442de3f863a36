#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "parex/grid.hpp"
#include "parex/kernel.hpp"

namespace parex {
namespace oracle {

/// Closed-form transition densities used for validation. All follow the
/// operator normalization dX = b dt + sqrt(2) L dW, so b = 0 reproduces
/// du/dt = Laplacian(u).
enum class ExactKernelKind {
    free_heat,
    constant_drift,
    ou_linear_drift,  ///< n = 1, b(x) = -x
};

double exact_kernel(ExactKernelKind kind, double t, std::span<const double> x,
                    std::span<const double> y, std::span<const double> mu = {});

/// Euler-Maruyama estimate of E[g(X_t)], X_0 = x0. Deterministic given the
/// seed; paths are chunked into independent substreams.
WeakResult euler_maruyama_expectation(std::span<const CoefficientField> drift,
                                      const ConstantDiffusion& diffusion,
                                      std::span<const double> x0, double t, const Payoff& g,
                                      int steps, std::int64_t paths, std::uint64_t seed);

struct FdProblem {
    int n = 1;                           ///< 1 or 2
    std::vector<double> diffusion;       ///< per-axis coefficients of d2/dxi2
    std::vector<CoefficientField> drift; ///< n fields
};

/// Crank-Nicolson reference solver, second order in space and time,
/// constant-extension boundaries.
GridState crank_nicolson_solve(const FdProblem& problem, const TensorGrid& grid,
                               std::function<double(std::span<const double>)> initial,
                               double dt, double T);

/// Closed-form solution of the reduced block problem
///   du/dt = (1/2) sigma^2 d2u/dx1^2 + mu du/dx2,  u(0,x) = f(x1) + g(x2):
/// heat-smoothed f plus transported g.
double reduced_example_solution(double t, std::span<const double> x, double sigma, double mu,
                                const std::function<double(double)>& f,
                                const std::function<double(double)>& g);

} // namespace oracle
} // namespace parex
