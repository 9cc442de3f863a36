#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "parex/multi_index.hpp"

namespace parex {

/// Truncated multivariate polynomial in Dx = x - y around a numeric base
/// point y. Coefficients are stored sparsely; absent multi-indices are zero.
/// Every operation is a pure value transform. Terms pushed past the degree
/// cap are dropped silently in value but counted in `truncation_loss` so
/// callers can report cap saturation.
class LocalPolynomial {
public:
    LocalPolynomial() = default;
    LocalPolynomial(int dim, std::vector<double> base_point, int degree_cap);

    static LocalPolynomial constant(double c, int dim, std::vector<double> base_point,
                                    int degree_cap);
    /// coeff * Dx^gamma (dropped immediately if |gamma| exceeds the cap).
    static LocalPolynomial monomial(double coeff, const MultiIndex& gamma,
                                    std::vector<double> base_point, int degree_cap);

    int dim() const { return dim_; }
    int degree_cap() const { return degree_cap_; }
    const std::vector<double>& base_point() const { return base_; }
    const std::map<MultiIndex, double>& coeffs() const { return coeffs_; }
    std::int64_t truncation_loss() const { return truncation_loss_; }

    double coeff(const MultiIndex& g) const;
    void set_coeff(const MultiIndex& g, double v);
    /// Adds into a coefficient, counting the term as truncation loss when it
    /// lies beyond the cap.
    void accumulate(const MultiIndex& g, double v);
    void add_truncation_loss(std::int64_t n) { truncation_loss_ += n; }

    bool is_zero() const { return coeffs_.empty(); }
    /// Highest |gamma| with a stored coefficient (-1 when empty).
    int degree() const;
    double max_abs_coeff() const;

    LocalPolynomial& operator+=(const LocalPolynomial& other);
    LocalPolynomial operator+(const LocalPolynomial& other) const;
    LocalPolynomial operator-(const LocalPolynomial& other) const;
    LocalPolynomial scaled(double s) const;

    /// Coefficientwise convolution truncated at the cap.
    LocalPolynomial multiply(const LocalPolynomial& other) const;

    /// Sum of second derivatives over all axes.
    LocalPolynomial laplacian() const;

    /// First derivative along one axis.
    LocalPolynomial partial(int axis) const;

    /// sum_l dP/dx_l * dQ/dx_l, truncated at the cap.
    LocalPolynomial gradient_dot(const LocalPolynomial& other) const;

    /// J_k[P](x) = Int_0^1 P(y + s*Dx) s^{k-1} ds. Since P is centered at y
    /// this is the diagonal scaling p_gamma -> p_gamma / (|gamma| + k); the
    /// result solves k*c + Dx.grad(c) = P term by term.
    LocalPolynomial ray_integral(int k) const;

    /// Same polynomial function re-expressed in powers of (x - new_base).
    LocalPolynomial recenter(std::vector<double> new_base) const;

    double eval(std::span<const double> x) const;

    /// Value at base-point displacement Dx (bypasses the base subtraction).
    double eval_delta(std::span<const double> dx) const;

private:
    void check_compatible(const LocalPolynomial& other) const;

    int dim_ = 0;
    std::vector<double> base_;
    int degree_cap_ = 0;
    std::map<MultiIndex, double> coeffs_;
    std::int64_t truncation_loss_ = 0;
};

/// P_k^gamma(x,y) = Int_0^1 (y + s*Dx)^gamma s^{k-1} ds expanded by the
/// binomial theorem: sum_{delta<=gamma} [prod_i C(gamma_i,delta_i)]
/// y^{gamma-delta} Dx^delta / (|delta| + k). Independent cross-check of
/// ray_integral composed with recenter.
LocalPolynomial monomial_ray_integral(const MultiIndex& gamma, std::vector<double> y,
                                      int k, int degree_cap);

} // namespace parex
