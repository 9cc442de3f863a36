#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "parex/errors.hpp"

namespace parex {

/// Multi-index gamma with non-negative integer entries, one per spatial axis.
struct MultiIndex {
    std::vector<int> exponents;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {
        for (int v : exponents)
            if (v < 0) throw InputError("MultiIndex: negative exponent");
    }
    static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }
    static MultiIndex unit(int dim, int axis, int power = 1) {
        std::vector<int> e(dim, 0);
        e.at(axis) = power;
        return MultiIndex(std::move(e));
    }

    int dim() const { return static_cast<int>(exponents.size()); }

    /// |gamma| = sum of entries.
    int order() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }

    int operator[](int i) const { return exponents[i]; }

    auto operator<=>(const MultiIndex&) const = default;

    /// gamma + unit vector on `axis` (used by derivative/monomial bookkeeping).
    MultiIndex bumped(int axis, int by) const {
        MultiIndex r = *this;
        r.exponents[axis] += by;
        if (r.exponents[axis] < 0) throw InputError("MultiIndex: bump below zero");
        return r;
    }

    std::string to_string() const {
        std::string s = "(";
        for (int i = 0; i < dim(); ++i) {
            if (i) s += ",";
            s += std::to_string(exponents[i]);
        }
        return s + ")";
    }
};

/// gamma! = product of per-axis factorials.
inline double multi_factorial(const MultiIndex& g) {
    double f = 1.0;
    for (int v : g.exponents)
        for (int i = 2; i <= v; ++i) f *= i;
    return f;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace parex
