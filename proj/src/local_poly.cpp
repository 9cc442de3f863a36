#include "parex/local_poly.hpp"

#include <cmath>
#include <cstdlib>

namespace parex {

LocalPolynomial::LocalPolynomial(int dim, std::vector<double> base_point, int degree_cap)
    : dim_(dim), base_(std::move(base_point)), degree_cap_(degree_cap) {
    if (dim_ < 1) throw InputError("LocalPolynomial: dim must be >= 1");
    if (static_cast<int>(base_.size()) != dim_)
        throw InputError("LocalPolynomial: base point length != dim");
    if (degree_cap_ < 0) throw InputError("LocalPolynomial: negative degree cap");
}

LocalPolynomial LocalPolynomial::constant(double c, int dim, std::vector<double> base_point,
                                          int degree_cap) {
    LocalPolynomial p(dim, std::move(base_point), degree_cap);
    if (c != 0.0) p.coeffs_[MultiIndex::zero(dim)] = c;
    return p;
}

LocalPolynomial LocalPolynomial::monomial(double coeff, const MultiIndex& gamma,
                                          std::vector<double> base_point, int degree_cap) {
    LocalPolynomial p(gamma.dim(), std::move(base_point), degree_cap);
    p.accumulate(gamma, coeff);
    return p;
}

double LocalPolynomial::coeff(const MultiIndex& g) const {
    auto it = coeffs_.find(g);
    return it == coeffs_.end() ? 0.0 : it->second;
}

void LocalPolynomial::set_coeff(const MultiIndex& g, double v) {
    if (g.dim() != dim_) throw InputError("LocalPolynomial: multi-index dim mismatch");
    if (g.order() > degree_cap_) throw InputError("LocalPolynomial: term beyond degree cap");
    if (v == 0.0)
        coeffs_.erase(g);
    else
        coeffs_[g] = v;
}

void LocalPolynomial::accumulate(const MultiIndex& g, double v) {
    if (v == 0.0) return;
    if (g.order() > degree_cap_) {
        ++truncation_loss_;
        return;
    }
    double& slot = coeffs_[g];
    slot += v;
    if (slot == 0.0) coeffs_.erase(g);
}

int LocalPolynomial::degree() const {
    int d = -1;
    for (const auto& [g, v] : coeffs_) d = std::max(d, g.order());
    return d;
}

double LocalPolynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [g, v] : coeffs_) m = std::max(m, std::abs(v));
    return m;
}

void LocalPolynomial::check_compatible(const LocalPolynomial& other) const {
    if (dim_ != other.dim_) throw InputError("LocalPolynomial: dimension mismatch");
    if (degree_cap_ != other.degree_cap_)
        throw InputError("LocalPolynomial: degree cap mismatch");
    if (base_ != other.base_) throw InputError("LocalPolynomial: base point mismatch");
}

LocalPolynomial& LocalPolynomial::operator+=(const LocalPolynomial& other) {
    check_compatible(other);
    for (const auto& [g, v] : other.coeffs_) accumulate(g, v);
    truncation_loss_ += other.truncation_loss_;
    return *this;
}

LocalPolynomial LocalPolynomial::operator+(const LocalPolynomial& other) const {
    LocalPolynomial r = *this;
    r += other;
    return r;
}

LocalPolynomial LocalPolynomial::operator-(const LocalPolynomial& other) const {
    return *this + other.scaled(-1.0);
}

LocalPolynomial LocalPolynomial::scaled(double s) const {
    LocalPolynomial r(dim_, base_, degree_cap_);
    r.truncation_loss_ = truncation_loss_;
    if (s == 0.0) return r;
    for (const auto& [g, v] : coeffs_) r.coeffs_[g] = v * s;
    return r;
}

LocalPolynomial LocalPolynomial::multiply(const LocalPolynomial& other) const {
    check_compatible(other);
    LocalPolynomial r(dim_, base_, degree_cap_);
    r.truncation_loss_ = truncation_loss_ + other.truncation_loss_;
    for (const auto& [ga, va] : coeffs_) {
        for (const auto& [gb, vb] : other.coeffs_) {
            if (ga.order() + gb.order() > degree_cap_) {
                ++r.truncation_loss_;
                continue;
            }
            MultiIndex g = ga;
            for (int i = 0; i < dim_; ++i) g.exponents[i] += gb.exponents[i];
            double& slot = r.coeffs_[g];
            slot += va * vb;
            if (slot == 0.0) r.coeffs_.erase(g);
        }
    }
    return r;
}

LocalPolynomial LocalPolynomial::laplacian() const {
    LocalPolynomial r(dim_, base_, degree_cap_);
    r.truncation_loss_ = truncation_loss_;
    for (const auto& [g, v] : coeffs_) {
        for (int l = 0; l < dim_; ++l) {
            int e = g[l];
            if (e < 2) continue;
            r.accumulate(g.bumped(l, -2), v * e * (e - 1));
        }
    }
    return r;
}

LocalPolynomial LocalPolynomial::partial(int axis) const {
    if (axis < 0 || axis >= dim_) throw InputError("LocalPolynomial: axis out of range");
    LocalPolynomial r(dim_, base_, degree_cap_);
    r.truncation_loss_ = truncation_loss_;
    for (const auto& [g, v] : coeffs_) {
        int e = g[axis];
        if (e < 1) continue;
        r.accumulate(g.bumped(axis, -1), v * e);
    }
    return r;
}

LocalPolynomial LocalPolynomial::gradient_dot(const LocalPolynomial& other) const {
    check_compatible(other);
    LocalPolynomial r(dim_, base_, degree_cap_);
    for (int l = 0; l < dim_; ++l) r += partial(l).multiply(other.partial(l));
    // partial() already carries the input losses; keep a single copy of each.
    r.add_truncation_loss(-(dim_ - 1) * (truncation_loss_ + other.truncation_loss_));
    return r;
}

LocalPolynomial LocalPolynomial::ray_integral(int k) const {
    if (k < 1) throw InputError("ray_integral: k must be >= 1");
    LocalPolynomial r(dim_, base_, degree_cap_);
    r.truncation_loss_ = truncation_loss_;
    for (const auto& [g, v] : coeffs_) r.coeffs_[g] = v / (g.order() + k);
    return r;
}

LocalPolynomial LocalPolynomial::recenter(std::vector<double> new_base) const {
    if (static_cast<int>(new_base.size()) != dim_)
        throw InputError("recenter: base point length != dim");
    std::vector<double> h(dim_);
    for (int i = 0; i < dim_; ++i) h[i] = new_base[i] - base_[i];

    LocalPolynomial r(dim_, std::move(new_base), degree_cap_);
    r.truncation_loss_ = truncation_loss_;
    // (Dx' + h)^gamma expanded binomially per axis.
    for (const auto& [g, v] : coeffs_) {
        std::vector<int> delta(dim_, 0);
        // iterate delta <= gamma in odometer order
        while (true) {
            double w = v;
            for (int i = 0; i < dim_; ++i) {
                w *= binomial(g[i], delta[i]);
                for (int p = 0; p < g[i] - delta[i]; ++p) w *= h[i];
            }
            if (w != 0.0) r.accumulate(MultiIndex(delta), w);
            int axis = 0;
            while (axis < dim_) {
                if (delta[axis] < g[axis]) {
                    ++delta[axis];
                    break;
                }
                delta[axis] = 0;
                ++axis;
            }
            if (axis == dim_) break;
        }
    }
    return r;
}

double LocalPolynomial::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw InputError("eval: point length != dim");
    std::vector<double> dx(dim_);
    for (int i = 0; i < dim_; ++i) dx[i] = x[i] - base_[i];
    return eval_delta(dx);
}

double LocalPolynomial::eval_delta(std::span<const double> dx) const {
    if (static_cast<int>(dx.size()) != dim_)
        throw InputError("eval_delta: point length != dim");
    // per-axis power tables up to the stored degree
    int maxdeg = degree();
    if (maxdeg < 0) return 0.0;
    std::vector<double> pows(static_cast<size_t>(dim_) * (maxdeg + 1));
    for (int i = 0; i < dim_; ++i) {
        pows[i * (maxdeg + 1)] = 1.0;
        for (int p = 1; p <= maxdeg; ++p)
            pows[i * (maxdeg + 1) + p] = pows[i * (maxdeg + 1) + p - 1] * dx[i];
    }
    double acc = 0.0;
    for (const auto& [g, v] : coeffs_) {
        double term = v;
        for (int i = 0; i < dim_; ++i) term *= pows[i * (maxdeg + 1) + g[i]];
        acc += term;
    }
    return acc;
}

LocalPolynomial monomial_ray_integral(const MultiIndex& gamma, std::vector<double> y, int k,
                                      int degree_cap) {
    if (k < 1) throw InputError("monomial_ray_integral: k must be >= 1");
    int dim = gamma.dim();
    LocalPolynomial r(dim, std::move(y), degree_cap);
    const auto& base = r.base_point();
    std::vector<int> delta(dim, 0);
    while (true) {
        double w = 1.0;
        int dsum = 0;
        for (int i = 0; i < dim; ++i) {
            w *= binomial(gamma[i], delta[i]);
            dsum += delta[i];
            for (int p = 0; p < gamma[i] - delta[i]; ++p) w *= base[i];
        }
        r.accumulate(MultiIndex(delta), w / (dsum + k));
        int axis = 0;
        while (axis < dim) {
            if (delta[axis] < gamma[axis]) {
                ++delta[axis];
                break;
            }
            delta[axis] = 0;
            ++axis;
        }
        if (axis == dim) break;
    }
    return r;
}

} // namespace parex
