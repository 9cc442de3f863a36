#include <doctest.h>

#include <cmath>

#include "parex/oracle.hpp"
#include "parex/quadrature.hpp"

using namespace parex;
using namespace parex::oracle;

namespace {

CoefficientField zero_drift(int dim) { return CoefficientField(PolyField(dim, {})); }

CoefficientField const_drift(double mu) {
    return CoefficientField(PolyField(1, {{MultiIndex::zero(1), mu}}));
}

CoefficientField ou_field() {
    return CoefficientField(PolyField(1, {{MultiIndex({1}), -1.0}}));
}

} // namespace

TEST_CASE("exact kernels: reference values") {
    double x[1] = {0.0}, y[1] = {0.0};
    CHECK(exact_kernel(ExactKernelKind::free_heat, 1.0, x, y) ==
          doctest::Approx(std::pow(4.0 * M_PI, -0.5)));
    CHECK_THROWS_AS(exact_kernel(ExactKernelKind::free_heat, 0.0, x, y), InputError);

    // mode of the drifted kernel sits at x = y - mu t
    double mu[1] = {1.3};
    double t = 0.4;
    double xm[1] = {-mu[0] * t}, y0[1] = {0.0};
    CHECK(exact_kernel(ExactKernelKind::constant_drift, t, xm, y0, mu) ==
          doctest::Approx(std::pow(4.0 * M_PI * t, -0.5)));

    // OU stationary limit is the unit-variance Gaussian
    double xs[1] = {0.7}, ys[1] = {0.4};
    double late = exact_kernel(ExactKernelKind::ou_linear_drift, 40.0, xs, ys);
    CHECK(late == doctest::Approx(std::exp(-0.4 * 0.4 / 2.0) / std::sqrt(2.0 * M_PI))
                      .epsilon(1e-12));
}

TEST_CASE("free heat kernel integrates to one under Gauss-Legendre") {
    for (double t : {0.01, 0.1, 1.0}) {
        auto rule = gauss_legendre_on(64, -12.0 * std::sqrt(t), 12.0 * std::sqrt(t));
        double acc = 0.0;
        double x[1] = {0.0};
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            double y[1] = {rule.nodes[i]};
            acc += rule.weights[i] * exact_kernel(ExactKernelKind::free_heat, t, x, y);
        }
        CHECK(std::abs(acc - 1.0) <= 1e-10);
    }
}

TEST_CASE("Euler-Maruyama: martingale, drifted mean, OU variance") {
    auto id = identity_diffusion(1);
    auto coordinate = [](std::span<const double> y) { return y[0]; };

    std::vector<CoefficientField> none{zero_drift(1)};
    auto r0 = euler_maruyama_expectation(none, id, std::vector<double>{0.7}, 0.5,
                                         coordinate, 32, 40000, 101);
    CHECK(std::abs(r0.estimate - 0.7) <= 3.0 * r0.std_error);

    std::vector<CoefficientField> cm{const_drift(0.9)};
    auto r1 = euler_maruyama_expectation(cm, id, std::vector<double>{0.1}, 0.5, coordinate,
                                         32, 40000, 202);
    CHECK(std::abs(r1.estimate - (0.1 + 0.9 * 0.5)) <= 3.0 * r1.std_error);

    std::vector<CoefficientField> ou{ou_field()};
    auto r2 = euler_maruyama_expectation(
        ou, id, std::vector<double>{0.0}, 1.0,
        [](std::span<const double> y) { return y[0] * y[0]; }, 256, 100000, 303);
    double want = 1.0 - std::exp(-2.0);
    CHECK(std::abs(r2.estimate - want) <= 3.0 * r2.std_error + 2e-3);
}

TEST_CASE("Euler-Maruyama weak bias halves when steps double") {
    // E[X_t] for the OU drift is exactly x0 (1 - dt)^steps under the scheme,
    // so the bias against x0 e^{-t} is deterministic up to MC noise
    auto id = identity_diffusion(1);
    std::vector<CoefficientField> ou{ou_field()};
    double x0 = 2.0, t = 1.0;
    auto coordinate = [](std::span<const double> y) { return y[0]; };
    auto coarse = euler_maruyama_expectation(ou, id, std::vector<double>{x0}, t, coordinate,
                                             16, 1000000, 404);
    auto fine = euler_maruyama_expectation(ou, id, std::vector<double>{x0}, t, coordinate,
                                           32, 1000000, 505);
    double want = x0 * std::exp(-t);
    double bias_coarse = std::abs(coarse.estimate - want);
    double bias_fine = std::abs(fine.estimate - want);
    double ratio = bias_coarse / bias_fine;
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);
}

TEST_CASE("Euler-Maruyama rejects bad inputs and reports non-finite drift") {
    auto id = identity_diffusion(1);
    std::vector<CoefficientField> none{zero_drift(1)};
    auto one = [](std::span<const double>) { return 1.0; };
    CHECK_THROWS_AS(euler_maruyama_expectation(none, id, std::vector<double>{0.0}, 1.0, one,
                                               0, 10, 1),
                    InputError);
    CHECK_THROWS_AS(euler_maruyama_expectation(none, id, std::vector<double>{0.0}, 1.0, one,
                                               10, 0, 1),
                    InputError);
}

TEST_CASE("Crank-Nicolson: heat Gaussian spreading on a 400-node grid") {
    FdProblem p;
    p.n = 1;
    p.diffusion = {1.0};
    p.drift = {zero_drift(1)};
    TensorGrid grid = TensorGrid::uniform(std::vector<double>{-7.0}, std::vector<double>{7.0},
                                          std::vector<int>{400});
    double v0 = 0.3, T = 0.25;
    GridState sol = crank_nicolson_solve(
        p, grid,
        [v0](std::span<const double> x) { return std::exp(-x[0] * x[0] / (2.0 * v0)); },
        2e-4, T);
    double vT = v0 + 2.0 * T;
    double worst = 0.0;
    for (std::int64_t i = 0; i < grid.size(); ++i) {
        double x = grid.axes[0][i];
        double want = std::sqrt(v0 / vT) * std::exp(-x * x / (2.0 * vT));
        worst = std::max(worst, std::abs(sol.values[i] - want));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("Crank-Nicolson: constant drift translates the Gaussian") {
    FdProblem p;
    p.n = 1;
    p.diffusion = {1.0};
    p.drift = {const_drift(1.0)};
    TensorGrid grid = TensorGrid::uniform(std::vector<double>{-7.0}, std::vector<double>{7.0},
                                          std::vector<int>{400});
    double v0 = 0.3, T = 0.25;
    GridState sol = crank_nicolson_solve(
        p, grid,
        [v0](std::span<const double> x) { return std::exp(-x[0] * x[0] / (2.0 * v0)); },
        2e-4, T);
    double vT = v0 + 2.0 * T;
    double worst = 0.0;
    for (std::int64_t i = 0; i < grid.size(); ++i) {
        double x = grid.axes[0][i] + 1.0 * T;  // forward transport by mu T
        double want = std::sqrt(v0 / vT) * std::exp(-x * x / (2.0 * vT));
        worst = std::max(worst, std::abs(sol.values[i] - want));
    }
    CHECK(worst <= 2e-4);
}

TEST_CASE("Crank-Nicolson: constants are exact solutions") {
    FdProblem p;
    p.n = 2;
    p.diffusion = {0.5, 0.0};
    FourierTerm term;
    term.freq = {0.0, 1.0, 0.0};
    term.sin_coeff = 0.3;
    p.drift = {CoefficientField(FourierField(2, {term})), zero_drift(2)};
    TensorGrid grid = TensorGrid::uniform(std::vector<double>{-2.0, -2.0},
                                          std::vector<double>{2.0, 2.0},
                                          std::vector<int>{31, 31});
    GridState sol = crank_nicolson_solve(
        p, grid, [](std::span<const double>) { return 1.0; }, 1e-2, 0.2);
    for (double v : sol.values) CHECK(std::abs(v - 1.0) <= 1e-8);
}

TEST_CASE("Crank-Nicolson refinement gains at least the space order") {
    FdProblem p;
    p.n = 1;
    p.diffusion = {1.0};
    p.drift = {zero_drift(1)};
    double v0 = 0.25, T = 0.1;
    auto initial = [v0](std::span<const double> x) {
        return std::exp(-x[0] * x[0] / (2.0 * v0));
    };
    auto run = [&](int nodes) {
        TensorGrid grid = TensorGrid::uniform(std::vector<double>{-8.0},
                                              std::vector<double>{8.0},
                                              std::vector<int>{nodes});
        GridState sol = crank_nicolson_solve(p, grid, initial, 5e-5, T);
        double vT = v0 + 2.0 * T;
        double worst = 0.0;
        for (std::int64_t i = 0; i < grid.size(); ++i) {
            double x = grid.axes[0][i];
            double want = std::sqrt(v0 / vT) * std::exp(-x * x / (2.0 * vT));
            worst = std::max(worst, std::abs(sol.values[i] - want));
        }
        return worst;
    };
    double coarse = run(101);
    double fine = run(201);
    CHECK(coarse / fine >= 3.5);
}

TEST_CASE("reduced example closed form") {
    auto f = [](double z) { return std::exp(-z * z); };
    auto g = [](double z) { return z; };
    double x[2] = {0.3, -0.2};
    CHECK(reduced_example_solution(0.0, x, 0.4, 1.0, f, g) ==
          doctest::Approx(f(0.3) + g(-0.2)));

    auto zero = [](double) { return 0.0; };
    CHECK(reduced_example_solution(0.7, x, 0.4, 1.0, zero, g) ==
          doctest::Approx(-0.2 + 1.0 * 0.7));

    // heat smoothing preserves linear functions
    auto lin = [](double z) { return z; };
    CHECK(reduced_example_solution(0.5, x, 0.4, 1.0, lin, zero) ==
          doctest::Approx(0.3).epsilon(1e-10));
}
