#pragma once

#include <vector>

namespace parex {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1], computed by Newton iteration on the
/// Legendre recurrence. Results are cached per node count.
const QuadratureRule& gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre_on(int n, double a, double b);

} // namespace parex
