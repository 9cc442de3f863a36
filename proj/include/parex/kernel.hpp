#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "parex/horizon.hpp"
#include "parex/wkb.hpp"

namespace parex {

/// Constant SPD diffusion matrix A = (a*_ij) together with the factor
/// L (L L^T = A) whose inverse maps the operator sum a*_ij d2/dxi dxj to
/// the pure Laplacian, z = Linv x. Row-major n x n storage.
struct ConstantDiffusion {
    int n = 0;
    std::vector<double> A;
    std::vector<double> L;
    std::vector<double> Linv;
    std::vector<double> Ainv;
    double det = 1.0;
};

/// Validates SPD-ness (names the offending eigenvalue otherwise) and
/// factorizes.
ConstantDiffusion make_constant_diffusion(std::span<const double> A, int n);

ConstantDiffusion identity_diffusion(int n);

using Payoff = std::function<double(std::span<const double>)>;
using EllipticityFn = std::function<double(std::span<const double>)>;

/// Cutoff for hypoelliptic problems: the density is defined to be zero
/// where the lower ellipticity constant falls to epsilon or below.
struct DegeneracyMask {
    double epsilon = 0.0;
    EllipticityFn ellipticity;
};

enum class KernelForm {
    wkb_exponent,  ///< prefactor * exp(-q/4t + sum c_k t^k)
    d_series,      ///< prefactor * sum d_k t^k
};

struct QuadratureSpec {
    int nodes = 32;
    double window_sigmas = 8.0;  ///< half-window = window_sigmas * sqrt(t), z-space
};

struct MonteCarloSpec {
    std::int64_t samples = 100000;
    std::int64_t chunk = 4096;
};

struct WeakResult {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Evaluable density approximation for
///   du/dt = sum a*_ij d2u/dxi dxj + sum b_i du/dx_i.
/// Holds the problem data (drift pushed forward to z coordinates where the
/// diffusion is the Laplacian) plus one expansion at the base point y, and
/// re-expands at other base points on demand (integration and sampling
/// place the expansion base at the integration variable).
class KernelApprox {
public:
    KernelApprox(std::vector<CoefficientField> drift,
                 std::optional<ConstantDiffusion> diffusion, std::vector<double> y,
                 ExpandOptions opts, KernelForm form, double horizon,
                 std::optional<DegeneracyMask> mask = std::nullopt);

    int dim() const { return n_; }
    KernelForm form() const { return form_; }
    double horizon() const { return horizon_; }
    const std::vector<double>& base_point() const { return base_y_; }
    const WkbExpansion& expansion() const { return expansion_; }
    const std::optional<ConstantDiffusion>& diffusion() const { return diffusion_; }
    const std::optional<DegeneracyMask>& mask() const { return mask_; }
    const std::vector<CoefficientField>& drift_z() const { return drift_z_; }
    bool trivial_drift() const { return trivial_; }

    std::vector<double> to_z(std::span<const double> x) const;
    std::vector<double> from_z(std::span<const double> z) const;

    /// Expansion based at an arbitrary x-space point.
    WkbExpansion expand_at(std::span<const double> y) const;
    WkbExpansion expand_at_z(std::span<const double> zy) const;

    /// p(t, x, y) with y = base_point(). Masked points evaluate to zero.
    double eval_density(double t, std::span<const double> x) const;

    /// Series factor (c- or d-form) for elapsed time t and z-displacement.
    double series_factor(const WkbExpansion& e, double t,
                         std::span<const double> dz) const;

    /// z-space kernel core without the det Jacobian.
    double kernel_core_z(const WkbExpansion& e, double t, std::span<const double> zx) const;

    bool masked(std::span<const double> x_point) const;

    void check_time(double t) const;

private:
    int n_;
    std::vector<CoefficientField> drift_z_;
    std::optional<ConstantDiffusion> diffusion_;
    ExpandOptions opts_;
    KernelForm form_;
    double horizon_;
    std::optional<DegeneracyMask> mask_;
    std::vector<double> base_y_;
    std::vector<double> base_z_;
    WkbExpansion expansion_;
    bool trivial_ = false;
    double sqrt_det_inv_ = 1.0;
};

struct ReducedProblem {
    ConstantDiffusion diffusion;
    std::vector<CoefficientField> drift;  ///< z-space drift
};

/// Global change of variables z = Linv x mapping the second-order part to
/// the Laplacian; pushes the drift forward and records det and Ainv so the
/// kernel can be mapped back: p(t,x,y) = det(A)^{-1/2} p_z(t, Linv x, Linv y).
ReducedProblem reduce_constant_diffusion(std::span<const double> A, int n,
                                         std::span<const CoefficientField> drift);

/// Int p(t, x, y) f(y) dy by tensor Gauss-Legendre quadrature, one
/// expansion per quadrature node (cached within the call). n <= 3.
double cauchy_solve(const KernelApprox& k, double t, std::span<const double> x,
                    const Payoff& f, const QuadratureSpec& quad);

/// Int p(t1, x, z) p(t2, z, y) dz, the Chapman-Kolmogorov composition used
/// to chain expansions past the horizon.
double semigroup_compose(const KernelApprox& k, double t1, double t2,
                         std::span<const double> x, std::span<const double> y,
                         const QuadratureSpec& quad);

/// Importance-sampled E[g(X_t)]: samples from the Gaussian leading factor
/// and weights by the d-series correction. Deterministic given the seed.
WeakResult weak_expectation(const KernelApprox& k, double t, std::span<const double> x,
                            const Payoff& g, const MonteCarloSpec& mc,
                            std::uint64_t seed);

} // namespace parex
