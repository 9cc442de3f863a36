#pragma once

#include <vector>

#include "parex/local_poly.hpp"

namespace parex {

/// Polynomial in Dx whose coefficients are themselves polynomials in time:
/// sum_l P_l(Dx) * Dt^l. Index l is the time power. All member polynomials
/// share base point and degree cap. Used for localized time-dependent
/// coefficient fields and for the time-inhomogeneous expansion tables.
struct TimePoly {
    std::vector<LocalPolynomial> by_power;

    bool empty() const { return by_power.empty(); }
    int max_time_power() const { return static_cast<int>(by_power.size()) - 1; }

    const LocalPolynomial& at(int l) const { return by_power.at(l); }

    static TimePoly zero(int dim, std::vector<double> base, int cap) {
        return TimePoly{{LocalPolynomial(dim, std::move(base), cap)}};
    }

    /// Ensures slots up to time power l exist (filled with zero polynomials).
    void grow(int l) {
        if (by_power.empty()) throw StateError("TimePoly: cannot grow empty series");
        const int dim = by_power.front().dim();
        const int cap = by_power.front().degree_cap();
        const std::vector<double> base = by_power.front().base_point();
        while (static_cast<int>(by_power.size()) <= l)
            by_power.emplace_back(dim, base, cap);
    }

    TimePoly& operator+=(const TimePoly& other) {
        if (by_power.empty()) {
            by_power = other.by_power;
            return *this;
        }
        grow(other.max_time_power());
        for (int l = 0; l < static_cast<int>(other.by_power.size()); ++l)
            by_power[l] += other.by_power[l];
        return *this;
    }

    TimePoly scaled(double s) const {
        TimePoly r;
        r.by_power.reserve(by_power.size());
        for (const auto& p : by_power) r.by_power.push_back(p.scaled(s));
        return r;
    }

    /// Convolution in the time index, spatial truncation per term. Time
    /// powers above `time_cap` are dropped and counted on the result.
    TimePoly multiply(const TimePoly& other, int time_cap) const {
        if (by_power.empty() || other.by_power.empty())
            throw StateError("TimePoly: multiply on empty series");
        const auto& proto = by_power.front();
        TimePoly r = zero(proto.dim(), proto.base_point(), proto.degree_cap());
        for (int la = 0; la < static_cast<int>(by_power.size()); ++la) {
            if (by_power[la].is_zero() && by_power[la].truncation_loss() == 0) continue;
            for (int lb = 0; lb < static_cast<int>(other.by_power.size()); ++lb) {
                int l = la + lb;
                auto term = by_power[la].multiply(other.by_power[lb]);
                if (l > time_cap) {
                    r.by_power[0].add_truncation_loss(
                        static_cast<std::int64_t>(term.coeffs().size()));
                    continue;
                }
                r.grow(l);
                r.by_power[l] += term;
            }
        }
        return r;
    }

    TimePoly laplacian() const {
        TimePoly r;
        for (const auto& p : by_power) r.by_power.push_back(p.laplacian());
        return r;
    }

    TimePoly partial(int axis) const {
        TimePoly r;
        for (const auto& p : by_power) r.by_power.push_back(p.partial(axis));
        return r;
    }

    /// d/dt: power l maps to l-1 with factor l.
    TimePoly time_derivative() const {
        if (by_power.empty()) throw StateError("TimePoly: time_derivative on empty");
        const auto& proto = by_power.front();
        TimePoly r = zero(proto.dim(), proto.base_point(), proto.degree_cap());
        for (int l = 1; l < static_cast<int>(by_power.size()); ++l) {
            r.grow(l - 1);
            r.by_power[l - 1] += by_power[l].scaled(static_cast<double>(l));
        }
        return r;
    }

    TimePoly ray_integral(int k) const {
        TimePoly r;
        for (const auto& p : by_power) r.by_power.push_back(p.ray_integral(k));
        return r;
    }

    /// Value at displacement Dx and elapsed time dt.
    double eval_delta(std::span<const double> dx, double dt) const {
        double acc = 0.0, tp = 1.0;
        for (const auto& p : by_power) {
            acc += tp * p.eval_delta(dx);
            tp *= dt;
        }
        return acc;
    }

    std::int64_t truncation_loss() const {
        std::int64_t n = 0;
        for (const auto& p : by_power) n += p.truncation_loss();
        return n;
    }
};

} // namespace parex
