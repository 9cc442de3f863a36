#pragma once

#include <span>
#include <vector>

#include "parex/wkb.hpp"

namespace parex {

struct HorizonParams {
    int n = 1;                        ///< spatial dimension
    int abs_m0 = 0;                   ///< max Fourier frequency |m0|
    double ebar = 0.0;                ///< Fourier coefficient bound
    double R = 1.0;                   ///< radius of a ball containing the domain
    bool variable_diffusion = false;  ///< true selects the factor-6 variant
};

struct HorizonBound {
    double beta = 0.0;
    bool drift_free = false;  ///< ebar or m0 vanished: any horizon is valid
    int factor = 3;           ///< 3 for constant diffusion, 6 for variable
};

/// Certified lower bound for the convergence horizon:
/// beta = 1 / (F * n * (2|m0|+1) * ebar * R^2 * |m0|^2), F in {3, 6}.
/// Returns +infinity with the drift_free marker when the drift data make
/// the bound vacuous (ebar = 0 or |m0| = 0: the series terminates).
HorizonBound beta_lower_bound(const HorizonParams& p);

struct RatioDiagnostic {
    double max_ratio = 0.0;
    bool converging = true;
};

/// Empirical tail-ratio check: r_k = max over samples of
/// |c_{k+1}(x)| t / |c_k(x)| for k = K/2 .. K-1, ignoring coefficient
/// values below 1e-14. converging = (max ratio < 1). One-sided: a failed
/// ratio at t far beyond the certified bound is reported, not judged.
RatioDiagnostic empirical_ratio_diagnostic(const WkbExpansion& exp, double t,
                                           std::span<const std::vector<double>> sample_points);

} // namespace parex
