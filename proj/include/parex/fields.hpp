#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "parex/time_poly.hpp"

namespace parex {

/// One term of a finite Fourier series:
///   sin_coeff * sin(freq.(t,x)) + cos_coeff * cos(freq.(t,x))
/// freq has length n+1; entry 0 is the time frequency. Frequencies are
/// ingested as integers but stored as doubles so that linear changes of
/// variables (the reducible-case push-forward) stay representable.
struct FourierTerm {
    std::vector<double> freq;
    double sin_coeff = 0.0;
    double cos_coeff = 0.0;
};

struct FourierField {
    int dim = 0;
    bool time_dependent = false;
    std::vector<FourierTerm> terms;

    FourierField() = default;
    FourierField(int n, std::vector<FourierTerm> t);
};

/// Polynomial field about the origin. Coefficients are monomial
/// coefficients (any 1/gamma! normalization is applied by whoever builds
/// the map; downstream algebra is monomial-based throughout).
struct PolyField {
    int dim = 0;
    std::map<MultiIndex, double> coeffs;
    int degree = 0;

    PolyField() = default;
    PolyField(int n, std::map<MultiIndex, double> c);
};

struct CoefficientField {
    std::variant<FourierField, PolyField> representation;
    std::optional<double> growth_bound;

    CoefficientField() = default;
    CoefficientField(FourierField f, std::optional<double> bound = std::nullopt);
    CoefficientField(PolyField p, std::optional<double> bound = std::nullopt);

    int dim() const;
    bool time_dependent() const;
    bool is_fourier() const { return std::holds_alternative<FourierField>(representation); }
    /// True when the field is identically zero (no stored terms).
    bool is_zero() const;
};

double evaluate_field(const CoefficientField& field, double t, std::span<const double> x);

/// Degree-D Taylor expansion about (t0, y) in powers of Dx and Dt (joint
/// total degree <= D). Fourier fields are differentiated analytically via
/// the quarter-period phase shift; PolyFields recenter exactly.
TimePoly localize(const CoefficientField& field, std::span<const double> y, double t0, int D);

struct FourierBounds {
    std::vector<int> m0;  ///< per-component max frequency, entry 0 = time
    int abs_m0 = 0;       ///< max over components
    double ebar = 0.0;    ///< max complex-exponential coefficient modulus
    int term_count_bound = 0;  ///< 2*abs_m0 + 1
};

/// Extracts the Fourier data (m0, ebar) feeding the horizon formula.
/// Throws InputError for PolyField inputs (no certified bound exists).
FourierBounds fourier_bounds(std::span<const CoefficientField> fields);

/// Restricts a field to the axes in `keep_axes`, freezing the remaining
/// coordinates at the values in `full_point` (length = original dim).
CoefficientField freeze(const CoefficientField& field, std::span<const int> keep_axes,
                        std::span<const double> full_point);

/// Push-forward of drift fields under x = L z: returns bt with
/// bt_k(z) = sum_i Linv[k][i] * b_i(L z). Matrices are row-major n*n.
std::vector<CoefficientField> linear_pushforward(std::span<const CoefficientField> fields,
                                                 std::span<const double> L,
                                                 std::span<const double> Linv, int n);

} // namespace parex
