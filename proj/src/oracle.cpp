#include "parex/oracle.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "parex/quadrature.hpp"
#include "parex/rng.hpp"

namespace parex {
namespace oracle {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double exact_kernel(ExactKernelKind kind, double t, std::span<const double> x,
                    std::span<const double> y, std::span<const double> mu) {
    if (t <= 0.0) throw InputError("exact_kernel: t must be > 0");
    int n = static_cast<int>(x.size());
    if (y.size() != x.size()) throw InputError("exact_kernel: point size mismatch");
    switch (kind) {
        case ExactKernelKind::free_heat: {
            double q = 0.0;
            for (int i = 0; i < n; ++i) q += (x[i] - y[i]) * (x[i] - y[i]);
            return std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-q / (4.0 * t));
        }
        case ExactKernelKind::constant_drift: {
            if (static_cast<int>(mu.size()) != n)
                throw InputError("exact_kernel: drift vector size mismatch");
            double q = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = x[i] - y[i] + mu[i] * t;
                q += d * d;
            }
            return std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-q / (4.0 * t));
        }
        case ExactKernelKind::ou_linear_drift: {
            if (n != 1) throw InputError("exact_kernel: OU kernel is 1-dimensional");
            double var = -std::expm1(-2.0 * t);
            double mean = x[0] * std::exp(-t);
            double d = y[0] - mean;
            return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
        }
    }
    throw InputError("exact_kernel: unknown kind");
}

WeakResult euler_maruyama_expectation(std::span<const CoefficientField> drift,
                                      const ConstantDiffusion& diffusion,
                                      std::span<const double> x0, double t, const Payoff& g,
                                      int steps, std::int64_t paths, std::uint64_t seed) {
    if (steps < 1) throw InputError("euler_maruyama: steps must be >= 1");
    if (paths < 1) throw InputError("euler_maruyama: paths must be >= 1");
    int n = static_cast<int>(x0.size());
    if (static_cast<int>(drift.size()) != n)
        throw InputError("euler_maruyama: drift size != dimension");
    double dt = t / steps;
    double root = std::sqrt(2.0 * dt);

    const std::int64_t chunk = 4096;
    std::int64_t chunks = (paths + chunk - 1) / chunk;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> xpt(n), xi(n), bump(n);
    std::int64_t done = 0;
    for (std::int64_t c = 0; c < chunks; ++c) {
        NormalStream stream(seed, static_cast<std::uint64_t>(c));
        std::int64_t count = std::min(chunk, paths - done);
        for (std::int64_t p = 0; p < count; ++p) {
            std::copy(x0.begin(), x0.end(), xpt.begin());
            double time = 0.0;
            for (int s = 0; s < steps; ++s) {
                for (int i = 0; i < n; ++i) xi[i] = stream.normal();
                for (int i = 0; i < n; ++i) {
                    double b = evaluate_field(drift[i], time, xpt);
                    if (!std::isfinite(b))
                        throw InputError("euler_maruyama: drift non-finite at path " +
                                         std::to_string(done + p));
                    double noise = 0.0;
                    for (int j = 0; j < n; ++j) noise += diffusion.L[i * n + j] * xi[j];
                    bump[i] = b * dt + root * noise;
                }
                for (int i = 0; i < n; ++i) xpt[i] += bump[i];
                time += dt;
            }
            double v = g(xpt);
            sum += v;
            sumsq += v * v;
        }
        done += count;
    }
    double m = static_cast<double>(paths);
    WeakResult r;
    r.estimate = sum / m;
    double var = std::max(0.0, (sumsq - sum * sum / m) / std::max(1.0, m - 1.0));
    r.std_error = std::sqrt(var / m);
    return r;
}

GridState crank_nicolson_solve(const FdProblem& problem, const TensorGrid& grid,
                               std::function<double(std::span<const double>)> initial,
                               double dt, double T) {
    if (problem.n != grid.dim() || problem.n < 1 || problem.n > 2)
        throw InputError("crank_nicolson_solve: dimension must be 1 or 2");
    if (static_cast<int>(problem.diffusion.size()) != problem.n ||
        static_cast<int>(problem.drift.size()) != problem.n)
        throw InputError("crank_nicolson_solve: coefficient arrays must match dimension");
    if (dt <= 0.0 || T <= 0.0) throw InputError("crank_nicolson_solve: bad time data");

    std::int64_t total = grid.size();
    int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
    double step_dt = T / steps;

    // Assemble L_h with centered second-order stencils and constant-extension
    // boundaries (clamped neighbor indices).
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    trips.reserve(static_cast<size_t>(total) * (1 + 4 * problem.n));
    std::vector<double> pt;
    for (std::int64_t flat = 0; flat < total; ++flat) {
        auto idx = grid.unflatten(flat);
        pt = grid.point(idx);
        for (int a = 0; a < problem.n; ++a) {
            double h = grid.spacing(a);
            int count = static_cast<int>(grid.axes[a].size());
            std::int64_t stride = grid.stride(a);
            auto clamped = [&](int shift) {
                int j = std::clamp(idx[a] + shift, 0, count - 1);
                return flat + static_cast<std::int64_t>(j - idx[a]) * stride;
            };
            double diff = problem.diffusion[a];
            double b = evaluate_field(problem.drift[a], 0.0, pt);
            // diffusion: (u_{i+1} - 2 u_i + u_{i-1}) / h^2
            trips.emplace_back(flat, clamped(1), diff / (h * h));
            trips.emplace_back(flat, clamped(-1), diff / (h * h));
            trips.emplace_back(flat, flat, -2.0 * diff / (h * h));
            // advection: b (u_{i+1} - u_{i-1}) / 2h
            trips.emplace_back(flat, clamped(1), b / (2.0 * h));
            trips.emplace_back(flat, clamped(-1), -b / (2.0 * h));
        }
    }
    Eigen::SparseMatrix<double> Lh(total, total);
    Lh.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseMatrix<double> I(total, total);
    I.setIdentity();
    Eigen::SparseMatrix<double> lhs = I - (step_dt / 2.0) * Lh;
    Eigen::SparseMatrix<double> rhs = I + (step_dt / 2.0) * Lh;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(lhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("crank_nicolson_solve: singular linear system");

    Eigen::VectorXd u(total);
    for (std::int64_t flat = 0; flat < total; ++flat) u[flat] = initial(grid.point(flat));

    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXd b = rhs * u;
        u = solver.solve(b);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("crank_nicolson_solve: solve failed");
    }

    GridState out;
    out.grid = grid;
    out.values.assign(u.data(), u.data() + total);
    out.time = T;
    out.validate();
    return out;
}

double reduced_example_solution(double t, std::span<const double> x, double sigma, double mu,
                                const std::function<double(double)>& f,
                                const std::function<double(double)>& g) {
    if (t < 0.0) throw InputError("reduced_example_solution: t must be >= 0");
    if (x.size() != 2) throw InputError("reduced_example_solution: point must be 2D");
    double transported = g(x[1] + mu * t);
    if (t == 0.0) return f(x[0]) + transported;
    double var = sigma * sigma * t;
    double sd = std::sqrt(var);
    QuadratureRule rule = gauss_legendre_on(96, x[0] - 12.0 * sd, x[0] + 12.0 * sd);
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        double y = rule.nodes[i];
        double gauss = std::exp(-(x[0] - y) * (x[0] - y) / (2.0 * var)) /
                       std::sqrt(2.0 * kPi * var);
        acc += rule.weights[i] * f(y) * gauss;
    }
    return acc + transported;
}

} // namespace oracle
} // namespace parex
