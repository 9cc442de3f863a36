#include "parex/horizon.hpp"

#include <cmath>
#include <limits>

namespace parex {

HorizonBound beta_lower_bound(const HorizonParams& p) {
    if (p.n < 1) throw InputError("beta_lower_bound: n must be >= 1");
    if (p.abs_m0 < 0 || p.ebar < 0) throw InputError("beta_lower_bound: negative bound data");
    if (p.R <= 0) throw InputError("beta_lower_bound: R must be > 0");
    HorizonBound b;
    b.factor = p.variable_diffusion ? 6 : 3;
    if (p.ebar == 0.0 || p.abs_m0 == 0) {
        b.beta = std::numeric_limits<double>::infinity();
        b.drift_free = true;
        return b;
    }
    double m = static_cast<double>(p.abs_m0);
    b.beta = 1.0 /
             (b.factor * p.n * (2.0 * m + 1.0) * p.ebar * p.R * p.R * m * m);
    return b;
}

RatioDiagnostic empirical_ratio_diagnostic(
    const WkbExpansion& exp, double t,
    std::span<const std::vector<double>> sample_points) {
    if (exp.order < 2) throw InputError("empirical_ratio_diagnostic: order must be >= 2");
    constexpr double kNegligible = 1e-14;
    RatioDiagnostic out;
    // Tail decay is judged in the sup norm over the sample grid: the ratio
    // of consecutive term maxima. Pointwise ratios are meaningless near
    // zeros of an individual c_k.
    std::vector<double> sup(exp.order + 1, 0.0);
    for (int k = exp.order / 2; k <= exp.order; ++k)
        for (const auto& x : sample_points)
            sup[k] = std::max(sup[k], std::abs(exp.c_value(k, t - exp.t0, x)));
    for (int k = exp.order / 2; k <= exp.order - 1; ++k) {
        double den = sup[k];
        double num = sup[k + 1] * t;
        if (den <= kNegligible && num <= kNegligible) continue;
        double r =
            den <= kNegligible ? std::numeric_limits<double>::infinity() : num / den;
        if (r > out.max_ratio) out.max_ratio = r;
    }
    out.converging = out.max_ratio < 1.0;
    return out;
}

} // namespace parex
