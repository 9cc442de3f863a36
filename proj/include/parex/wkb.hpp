#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "parex/fields.hpp"

namespace parex {

/// Ordered table of expansion coefficients c_0..c_K for one base point.
/// Entry k is a TimePoly; in the time-homogeneous case it carries a single
/// time power l = 0. The kernel built from the table is
///   (4 pi t)^(-n/2) exp(-|Dx|^2/(4 t) + sum_k c_k(t,x) t^k)
/// or the equivalent d-series form, valid for t below the horizon bound.
struct WkbExpansion {
    std::vector<double> base_point;
    int order = 0;       ///< K
    int degree_cap = 0;  ///< D
    double t0 = 0.0;     ///< coefficient freeze time (inhomogeneous case)
    bool time_inhomogeneous = false;
    std::vector<TimePoly> c;                     ///< K+1 entries
    std::vector<std::int64_t> truncation_report; ///< per-k loss counters

    int dim() const { return static_cast<int>(base_point.size()); }

    /// c_k evaluated at spatial point x and elapsed time dt (= t - t0).
    double c_value(int k, double dt, std::span<const double> x) const;
    double c_value_delta(int k, double dt, std::span<const double> dx) const;

    /// All K+1 coefficient values at one point.
    std::vector<double> c_values(double dt, std::span<const double> x) const;
};

struct ExpandOptions {
    int order = 2;            ///< K
    int degree_cap = -1;      ///< D; -1 selects max(2K + drift degree, 4)
    bool time_inhomogeneous = false;
    int time_power_cap = -1;  ///< -1 selects K
};

/// c_0 = 1/2 sum_m (y_m - x_m) Int_0^1 b_m(t0, y + s Dx) ds.
TimePoly compute_c0(std::span<const CoefficientField> drift, std::span<const double> y,
                    double t0, int D, bool time_inhomogeneous, int time_power_cap);

/// Builds R_{k-1} = lap(c_{k-1}) + sum_{r} grad(c_r).grad(c_{k-1-r})
///                + sum_m b_m d/dx_m c_{k-1} [- dc_{k-1}/dt when inhomogeneous]
/// and returns its ray integral J_k. Requires c_0..c_{k-1} in `expansion`.
TimePoly compute_ck(const WkbExpansion& expansion, std::span<const TimePoly> localized_drift,
                    int k, int time_power_cap);

/// Logarithmic (Leibniz) recursion: d_0 = exp(c_0),
/// d_k = sum_{i=1..k} (i/k) d_{k-i} c_i, pointwise on scalar c values.
std::vector<double> compute_dk(std::span<const double> c_values);

WkbExpansion expand(std::span<const CoefficientField> drift, std::span<const double> y,
                    double t0, const ExpandOptions& opts);

/// Default degree cap: max(2K + localization degree of the drift, 4).
/// PolyFields use their exact degree; Fourier fields default to 4.
int default_degree_cap(std::span<const CoefficientField> drift, int order);

} // namespace parex
