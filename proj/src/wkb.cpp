#include "parex/wkb.hpp"

#include <cmath>

namespace parex {

double WkbExpansion::c_value(int k, double dt, std::span<const double> x) const {
    std::vector<double> dx(base_point.size());
    for (size_t i = 0; i < dx.size(); ++i) dx[i] = x[i] - base_point[i];
    return c_value_delta(k, dt, dx);
}

double WkbExpansion::c_value_delta(int k, double dt, std::span<const double> dx) const {
    return c.at(k).eval_delta(dx, dt);
}

std::vector<double> WkbExpansion::c_values(double dt, std::span<const double> x) const {
    std::vector<double> dx(base_point.size());
    for (size_t i = 0; i < dx.size(); ++i) dx[i] = x[i] - base_point[i];
    std::vector<double> out(c.size());
    for (size_t k = 0; k < c.size(); ++k) out[k] = c[k].eval_delta(dx, dt);
    return out;
}

TimePoly compute_c0(std::span<const CoefficientField> drift, std::span<const double> y,
                    double t0, int D, bool time_inhomogeneous, int time_power_cap) {
    int n = static_cast<int>(y.size());
    if (static_cast<int>(drift.size()) != n)
        throw InputError("compute_c0: drift size != dimension");
    std::vector<double> base(y.begin(), y.end());
    TimePoly c0 = TimePoly::zero(n, base, D);
    for (int m = 0; m < n; ++m) {
        if (drift[m].dim() != n) throw InputError("compute_c0: field dimension mismatch");
        if (!time_inhomogeneous && drift[m].time_dependent())
            throw InputError("compute_c0: time-dependent drift needs inhomogeneous mode");
        TimePoly bm = localize(drift[m], y, t0, D);
        TimePoly integrated = bm.ray_integral(1);
        TimePoly dxm =
            TimePoly{{LocalPolynomial::monomial(-0.5, MultiIndex::unit(n, m), base, D)}};
        c0 += integrated.multiply(dxm, time_power_cap);
    }
    return c0;
}

TimePoly compute_ck(const WkbExpansion& expansion, std::span<const TimePoly> localized_drift,
                    int k, int time_power_cap) {
    if (k < 1) throw InputError("compute_ck: k must be >= 1");
    if (static_cast<int>(expansion.c.size()) < k)
        throw StateError("compute_ck: predecessors c_0..c_{k-1} missing");
    const TimePoly& prev = expansion.c[k - 1];
    int n = expansion.dim();

    TimePoly r = prev.laplacian();
    for (int j = 0; j < k; ++j) {
        const TimePoly& a = expansion.c[j];
        const TimePoly& b = expansion.c[k - 1 - j];
        for (int l = 0; l < n; ++l)
            r += a.partial(l).multiply(b.partial(l), time_power_cap);
    }
    for (int m = 0; m < n; ++m)
        r += localized_drift[m].multiply(prev.partial(m), time_power_cap);
    if (expansion.time_inhomogeneous) {
        // The t^k grading puts d/dt c_k on the left side of the order-(k-1)
        // match, so the previous coefficient's time derivative enters the
        // source negatively.
        r += prev.time_derivative().scaled(-1.0);
    }
    return r.ray_integral(k);
}

std::vector<double> compute_dk(std::span<const double> c_values) {
    std::vector<double> d(c_values.size());
    if (d.empty()) return d;
    d[0] = std::exp(c_values[0]);
    for (size_t k = 1; k < d.size(); ++k) {
        double acc = 0.0;
        for (size_t i = 1; i <= k; ++i)
            acc += static_cast<double>(i) / static_cast<double>(k) * d[k - i] * c_values[i];
        d[k] = acc;
    }
    return d;
}

int default_degree_cap(std::span<const CoefficientField> drift, int order) {
    int deg = 0;
    for (const auto& f : drift) {
        if (const auto* p = std::get_if<PolyField>(&f.representation))
            deg = std::max(deg, p->degree);
        else if (!f.is_zero())
            deg = std::max(deg, 4);
    }
    return std::max(2 * order + deg, 4);
}

WkbExpansion expand(std::span<const CoefficientField> drift, std::span<const double> y,
                    double t0, const ExpandOptions& opts) {
    if (opts.order < 0) throw InputError("expand: order must be >= 0");
    int n = static_cast<int>(y.size());
    if (static_cast<int>(drift.size()) != n)
        throw InputError("expand: drift size != dimension");
    int D = opts.degree_cap >= 0 ? opts.degree_cap : default_degree_cap(drift, opts.order);
    int lcap = opts.time_inhomogeneous
                   ? (opts.time_power_cap >= 0 ? opts.time_power_cap : opts.order)
                   : 0;

    WkbExpansion e;
    e.base_point.assign(y.begin(), y.end());
    e.order = opts.order;
    e.degree_cap = D;
    e.t0 = t0;
    e.time_inhomogeneous = opts.time_inhomogeneous;

    std::vector<TimePoly> localized(n);
    for (int m = 0; m < n; ++m) localized[m] = localize(drift[m], y, t0, D);

    e.c.push_back(compute_c0(drift, y, t0, D, opts.time_inhomogeneous, lcap));
    for (int k = 1; k <= opts.order; ++k)
        e.c.push_back(compute_ck(e, localized, k, lcap));

    e.truncation_report.resize(e.c.size());
    for (size_t k = 0; k < e.c.size(); ++k) e.truncation_report[k] = e.c[k].truncation_loss();
    return e;
}

} // namespace parex
