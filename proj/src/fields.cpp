#include "parex/fields.hpp"

#include <algorithm>
#include <cmath>

namespace parex {

FourierField::FourierField(int n, std::vector<FourierTerm> t) : dim(n), terms(std::move(t)) {
    if (dim < 1) throw InputError("FourierField: dim must be >= 1");
    for (const auto& term : terms) {
        if (static_cast<int>(term.freq.size()) != dim + 1)
            throw InputError("FourierField: frequency vector must have length dim+1");
        if (term.freq[0] != 0.0) time_dependent = true;
    }
}

PolyField::PolyField(int n, std::map<MultiIndex, double> c) : dim(n), coeffs(std::move(c)) {
    if (dim < 1) throw InputError("PolyField: dim must be >= 1");
    for (const auto& [g, v] : coeffs) {
        if (g.dim() != dim) throw InputError("PolyField: multi-index dim mismatch");
        degree = std::max(degree, g.order());
    }
}

CoefficientField::CoefficientField(FourierField f, std::optional<double> bound)
    : representation(std::move(f)), growth_bound(bound) {
    if (growth_bound && *growth_bound <= 0.0)
        throw InputError("CoefficientField: growth_bound must be > 0");
}

CoefficientField::CoefficientField(PolyField p, std::optional<double> bound)
    : representation(std::move(p)), growth_bound(bound) {
    if (growth_bound && *growth_bound <= 0.0)
        throw InputError("CoefficientField: growth_bound must be > 0");
}

int CoefficientField::dim() const {
    return std::visit([](const auto& r) { return r.dim; }, representation);
}

bool CoefficientField::time_dependent() const {
    if (const auto* f = std::get_if<FourierField>(&representation)) return f->time_dependent;
    return false;
}

bool CoefficientField::is_zero() const {
    if (const auto* f = std::get_if<FourierField>(&representation)) {
        for (const auto& t : f->terms)
            if (t.sin_coeff != 0.0 || t.cos_coeff != 0.0) return false;
        return true;
    }
    return std::get<PolyField>(representation).coeffs.empty();
}

double evaluate_field(const CoefficientField& field, double t, std::span<const double> x) {
    if (static_cast<int>(x.size()) != field.dim())
        throw InputError("evaluate_field: point length != field dim");
    if (const auto* f = std::get_if<FourierField>(&field.representation)) {
        double acc = 0.0;
        for (const auto& term : f->terms) {
            double theta = term.freq[0] * t;
            for (int i = 0; i < f->dim; ++i) theta += term.freq[i + 1] * x[i];
            acc += term.sin_coeff * std::sin(theta) + term.cos_coeff * std::cos(theta);
        }
        return acc;
    }
    const auto& p = std::get<PolyField>(field.representation);
    double acc = 0.0;
    for (const auto& [g, v] : p.coeffs) {
        double term = v;
        for (int i = 0; i < p.dim; ++i)
            for (int e = 0; e < g[i]; ++e) term *= x[i];
        acc += term;
    }
    return acc;
}

namespace {

// Localizes one Fourier term about (t0, y) to joint degree D. Works in an
// (n+1)-dimensional polynomial where axis 0 is Dt, then splits by time power.
void localize_fourier_term(const FourierTerm& term, std::span<const double> y, double t0,
                           int D, int n, TimePoly& out) {
    double theta0 = term.freq[0] * t0;
    for (int i = 0; i < n; ++i) theta0 += term.freq[i + 1] * y[i];
    const double s0 = std::sin(theta0), c0 = std::cos(theta0);

    std::vector<double> ebase(n + 1, 0.0);
    LocalPolynomial u(n + 1, ebase, D);
    if (term.freq[0] != 0.0) u.set_coeff(MultiIndex::unit(n + 1, 0), term.freq[0]);
    for (int i = 0; i < n; ++i)
        if (term.freq[i + 1] != 0.0)
            u.set_coeff(MultiIndex::unit(n + 1, i + 1), term.freq[i + 1]);

    // sin(theta0+u) = sum_m sin(theta0 + m pi/2) u^m / m!   (same for cos)
    const double sin_cycle[4] = {s0, c0, -s0, -c0};
    const double cos_cycle[4] = {c0, -s0, -c0, s0};

    LocalPolynomial upow = LocalPolynomial::constant(1.0, n + 1, ebase, D);
    double inv_fact = 1.0;
    for (int m = 0; m <= D; ++m) {
        if (m > 0) {
            upow = upow.multiply(u);
            inv_fact /= m;
            if (upow.is_zero()) break;
        }
        double w = (term.sin_coeff * sin_cycle[m % 4] + term.cos_coeff * cos_cycle[m % 4]) *
                   inv_fact;
        if (w == 0.0) continue;
        for (const auto& [g, v] : upow.coeffs()) {
            int l = g[0];
            std::vector<int> spatial(g.exponents.begin() + 1, g.exponents.end());
            out.grow(l);
            out.by_power[l].accumulate(MultiIndex(std::move(spatial)), w * v);
        }
    }
}

} // namespace

TimePoly localize(const CoefficientField& field, std::span<const double> y, double t0, int D) {
    if (D < 0) throw InputError("localize: degree cap must be >= 0");
    int n = field.dim();
    if (static_cast<int>(y.size()) != n)
        throw InputError("localize: base point length != field dim");
    std::vector<double> base(y.begin(), y.end());
    TimePoly out = TimePoly::zero(n, base, D);

    if (const auto* f = std::get_if<FourierField>(&field.representation)) {
        for (const auto& term : f->terms) localize_fourier_term(term, y, t0, D, n, out);
        return out;
    }
    const auto& p = std::get<PolyField>(field.representation);
    LocalPolynomial about_origin(n, std::vector<double>(n, 0.0), std::max(D, p.degree));
    for (const auto& [g, v] : p.coeffs) about_origin.set_coeff(g, v);
    LocalPolynomial shifted = about_origin.recenter(base);
    // re-truncate to cap D
    for (const auto& [g, v] : shifted.coeffs()) out.by_power[0].accumulate(g, v);
    return out;
}

FourierBounds fourier_bounds(std::span<const CoefficientField> fields) {
    FourierBounds b;
    bool any = false;
    for (const auto& field : fields) {
        const auto* f = std::get_if<FourierField>(&field.representation);
        if (!f)
            throw InputError(
                "fourier_bounds: unsupported representation (PolyField has no "
                "certified Fourier bound)");
        if (!any) {
            b.m0.assign(f->dim + 1, 0);
            any = true;
        }
        if (static_cast<int>(b.m0.size()) != f->dim + 1)
            throw InputError("fourier_bounds: fields have mixed dimensions");
        for (const auto& term : f->terms) {
            if (term.sin_coeff == 0.0 && term.cos_coeff == 0.0) continue;
            for (int c = 0; c <= f->dim; ++c) {
                int m = static_cast<int>(std::ceil(std::abs(term.freq[c]) - 1e-12));
                b.m0[c] = std::max(b.m0[c], m);
            }
            double modulus =
                0.5 * std::sqrt(term.sin_coeff * term.sin_coeff +
                                term.cos_coeff * term.cos_coeff);
            b.ebar = std::max(b.ebar, modulus);
        }
    }
    if (!any) throw InputError("fourier_bounds: no fields given");
    b.abs_m0 = *std::max_element(b.m0.begin(), b.m0.end());
    b.term_count_bound = 2 * b.abs_m0 + 1;
    return b;
}

CoefficientField freeze(const CoefficientField& field, std::span<const int> keep_axes,
                        std::span<const double> full_point) {
    int n = field.dim();
    if (static_cast<int>(full_point.size()) != n)
        throw InputError("freeze: point length != field dim");
    int m = static_cast<int>(keep_axes.size());
    if (m < 1 || m > n) throw InputError("freeze: bad axis selection");
    std::vector<bool> kept(n, false);
    for (int a : keep_axes) {
        if (a < 0 || a >= n || kept[a]) throw InputError("freeze: bad axis index");
        kept[a] = true;
    }

    if (const auto* f = std::get_if<FourierField>(&field.representation)) {
        std::vector<FourierTerm> terms;
        terms.reserve(f->terms.size());
        for (const auto& term : f->terms) {
            double phi = 0.0;
            for (int i = 0; i < n; ++i)
                if (!kept[i]) phi += term.freq[i + 1] * full_point[i];
            FourierTerm nt;
            nt.freq.resize(m + 1);
            nt.freq[0] = term.freq[0];
            for (int j = 0; j < m; ++j) nt.freq[j + 1] = term.freq[keep_axes[j] + 1];
            double cp = std::cos(phi), sp = std::sin(phi);
            nt.sin_coeff = term.sin_coeff * cp - term.cos_coeff * sp;
            nt.cos_coeff = term.sin_coeff * sp + term.cos_coeff * cp;
            terms.push_back(std::move(nt));
        }
        return CoefficientField(FourierField(m, std::move(terms)), field.growth_bound);
    }

    const auto& p = std::get<PolyField>(field.representation);
    std::map<MultiIndex, double> coeffs;
    for (const auto& [g, v] : p.coeffs) {
        double w = v;
        std::vector<int> rg(m, 0);
        for (int i = 0; i < n; ++i) {
            if (kept[i]) continue;
            for (int e = 0; e < g[i]; ++e) w *= full_point[i];
        }
        for (int j = 0; j < m; ++j) rg[j] = g[keep_axes[j]];
        if (w == 0.0) continue;
        coeffs[MultiIndex(std::move(rg))] += w;
    }
    for (auto it = coeffs.begin(); it != coeffs.end();)
        it = (it->second == 0.0) ? coeffs.erase(it) : std::next(it);
    return CoefficientField(PolyField(m, std::move(coeffs)), field.growth_bound);
}

std::vector<CoefficientField> linear_pushforward(std::span<const CoefficientField> fields,
                                                 std::span<const double> L,
                                                 std::span<const double> Linv, int n) {
    if (static_cast<int>(fields.size()) != n)
        throw InputError("linear_pushforward: need one field per dimension");
    if (static_cast<int>(L.size()) != n * n || static_cast<int>(Linv.size()) != n * n)
        throw InputError("linear_pushforward: matrix size mismatch");

    // b_i(L z) for every input field, reused across all outputs
    struct Composed {
        bool fourier;
        std::vector<FourierTerm> terms;       // transformed frequencies
        std::map<MultiIndex, double> coeffs;  // substituted polynomial
        int degree = 0;
    };
    std::vector<Composed> composed(n);
    for (int i = 0; i < n; ++i) {
        if (const auto* f = std::get_if<FourierField>(&fields[i].representation)) {
            Composed c;
            c.fourier = true;
            for (const auto& term : f->terms) {
                FourierTerm nt = term;
                for (int k = 0; k < n; ++k) {
                    double acc = 0.0;
                    for (int r = 0; r < n; ++r) acc += L[r * n + k] * term.freq[r + 1];
                    nt.freq[k + 1] = acc;  // (L^T j)_k
                }
                c.terms.push_back(std::move(nt));
            }
            composed[i] = std::move(c);
        } else {
            const auto& p = std::get<PolyField>(fields[i].representation);
            // substitute x_r = sum_m L[r][m] z_m via polynomial products
            std::vector<double> origin(n, 0.0);
            int cap = std::max(p.degree, 1);
            LocalPolynomial acc(n, origin, cap);
            std::vector<LocalPolynomial> linear_forms;
            linear_forms.reserve(n);
            for (int r = 0; r < n; ++r) {
                LocalPolynomial lf(n, origin, cap);
                for (int m = 0; m < n; ++m)
                    if (L[r * n + m] != 0.0)
                        lf.set_coeff(MultiIndex::unit(n, m), L[r * n + m]);
                linear_forms.push_back(std::move(lf));
            }
            for (const auto& [g, v] : p.coeffs) {
                LocalPolynomial mono = LocalPolynomial::constant(v, n, origin, cap);
                for (int r = 0; r < n; ++r)
                    for (int e = 0; e < g[r]; ++e) mono = mono.multiply(linear_forms[r]);
                acc += mono;
            }
            Composed c;
            c.fourier = false;
            c.coeffs = acc.coeffs();
            c.degree = p.degree;
            composed[i] = std::move(c);
        }
    }

    std::vector<CoefficientField> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        bool all_fourier = true, all_poly = true;
        for (int i = 0; i < n; ++i) {
            if (Linv[k * n + i] == 0.0) continue;
            (composed[i].fourier ? all_poly : all_fourier) = false;
        }
        if (!all_fourier && !all_poly)
            throw InputError(
                "linear_pushforward: cannot mix Fourier and polynomial drift "
                "components under a non-diagonal transform");
        if (all_fourier) {
            std::vector<FourierTerm> terms;
            for (int i = 0; i < n; ++i) {
                double w = Linv[k * n + i];
                if (w == 0.0) continue;
                for (const auto& term : composed[i].terms) {
                    FourierTerm nt = term;
                    nt.sin_coeff *= w;
                    nt.cos_coeff *= w;
                    terms.push_back(std::move(nt));
                }
            }
            out.emplace_back(FourierField(n, std::move(terms)));
        } else {
            std::map<MultiIndex, double> coeffs;
            for (int i = 0; i < n; ++i) {
                double w = Linv[k * n + i];
                if (w == 0.0) continue;
                for (const auto& [g, v] : composed[i].coeffs) coeffs[g] += w * v;
            }
            for (auto it = coeffs.begin(); it != coeffs.end();)
                it = (it->second == 0.0) ? coeffs.erase(it) : std::next(it);
            out.emplace_back(PolyField(n, std::move(coeffs)));
        }
    }
    return out;
}

} // namespace parex
