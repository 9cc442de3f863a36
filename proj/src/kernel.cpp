#include "parex/kernel.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "parex/quadrature.hpp"
#include "parex/rng.hpp"

namespace parex {

namespace {

Eigen::MatrixXd to_eigen(std::span<const double> A, int n) {
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = A[i * n + j];
    return M;
}

std::vector<double> from_eigen(const Eigen::MatrixXd& M) {
    std::vector<double> v(M.rows() * M.cols());
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) v[i * M.cols() + j] = M(i, j);
    return v;
}

std::vector<double> matvec(std::span<const double> M, std::span<const double> x, int n) {
    std::vector<double> r(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i] += M[i * n + j] * x[j];
    return r;
}

} // namespace

ConstantDiffusion make_constant_diffusion(std::span<const double> A, int n) {
    if (n < 1 || static_cast<int>(A.size()) != n * n)
        throw InputError("make_constant_diffusion: bad matrix size");
    Eigen::MatrixXd M = to_eigen(A, n);
    if (!M.isApprox(M.transpose(), 1e-12))
        throw InputError("make_constant_diffusion: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    for (int i = 0; i < n; ++i) {
        if (es.eigenvalues()[i] <= 0.0)
            throw InputError("make_constant_diffusion: matrix not SPD (eigenvalue " +
                             std::to_string(es.eigenvalues()[i]) + ")");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    Eigen::MatrixXd L = llt.matrixL();
    ConstantDiffusion d;
    d.n = n;
    d.A.assign(A.begin(), A.end());
    d.L = from_eigen(L);
    d.Linv = from_eigen(L.inverse().eval());
    d.Ainv = from_eigen(M.inverse().eval());
    d.det = M.determinant();
    return d;
}

ConstantDiffusion identity_diffusion(int n) {
    std::vector<double> I(n * n, 0.0);
    for (int i = 0; i < n; ++i) I[i * n + i] = 1.0;
    return make_constant_diffusion(I, n);
}

ReducedProblem reduce_constant_diffusion(std::span<const double> A, int n,
                                         std::span<const CoefficientField> drift) {
    ReducedProblem r;
    r.diffusion = make_constant_diffusion(A, n);
    r.drift = linear_pushforward(drift, r.diffusion.L, r.diffusion.Linv, n);
    return r;
}

KernelApprox::KernelApprox(std::vector<CoefficientField> drift,
                           std::optional<ConstantDiffusion> diffusion,
                           std::vector<double> y, ExpandOptions opts, KernelForm form,
                           double horizon, std::optional<DegeneracyMask> mask)
    : n_(static_cast<int>(y.size())),
      diffusion_(std::move(diffusion)),
      opts_(opts),
      form_(form),
      horizon_(horizon),
      mask_(std::move(mask)),
      base_y_(std::move(y)) {
    if (horizon_ <= 0.0) throw InputError("KernelApprox: horizon must be > 0");
    if (static_cast<int>(drift.size()) != n_)
        throw InputError("KernelApprox: drift size != dimension");
    if (mask_ && mask_->epsilon <= 0.0)
        throw InputError("KernelApprox: mask epsilon must be > 0");
    if (diffusion_) {
        if (diffusion_->n != n_) throw InputError("KernelApprox: diffusion dim mismatch");
        drift_z_ = linear_pushforward(drift, diffusion_->L, diffusion_->Linv, n_);
        sqrt_det_inv_ = 1.0 / std::sqrt(diffusion_->det);
    } else {
        drift_z_ = std::move(drift);
    }
    trivial_ = true;
    for (const auto& f : drift_z_)
        if (!f.is_zero()) trivial_ = false;
    base_z_ = to_z(base_y_);
    expansion_ = expand_at_z(base_z_);
}

std::vector<double> KernelApprox::to_z(std::span<const double> x) const {
    if (!diffusion_) return std::vector<double>(x.begin(), x.end());
    return matvec(diffusion_->Linv, x, n_);
}

std::vector<double> KernelApprox::from_z(std::span<const double> z) const {
    if (!diffusion_) return std::vector<double>(z.begin(), z.end());
    return matvec(diffusion_->L, z, n_);
}

WkbExpansion KernelApprox::expand_at(std::span<const double> y) const {
    return expand_at_z(to_z(y));
}

WkbExpansion KernelApprox::expand_at_z(std::span<const double> zy) const {
    if (trivial_) {
        WkbExpansion e;
        e.base_point.assign(zy.begin(), zy.end());
        e.order = opts_.order;
        e.degree_cap = std::max(opts_.degree_cap, 0);
        e.time_inhomogeneous = opts_.time_inhomogeneous;
        for (int k = 0; k <= opts_.order; ++k)
            e.c.push_back(TimePoly::zero(n_, e.base_point, e.degree_cap));
        e.truncation_report.assign(opts_.order + 1, 0);
        return e;
    }
    return expand(drift_z_, zy, 0.0, opts_);
}

bool KernelApprox::masked(std::span<const double> x_point) const {
    return mask_ && mask_->ellipticity(x_point) <= mask_->epsilon;
}

void KernelApprox::check_time(double t) const {
    if (t <= 0.0) throw InputError("kernel evaluation requires t > 0");
    if (t > horizon_)
        throw HorizonError("time " + std::to_string(t) +
                               " exceeds the certified horizon " + std::to_string(horizon_) +
                               "; compose shorter steps via the semigroup property",
                           horizon_);
}

double KernelApprox::series_factor(const WkbExpansion& e, double t,
                                   std::span<const double> dz) const {
    if (trivial_) return 1.0;
    if (form_ == KernelForm::wkb_exponent) {
        double acc = 0.0, tp = 1.0;
        for (int k = 0; k <= e.order; ++k) {
            acc += e.c_value_delta(k, t, dz) * tp;
            tp *= t;
        }
        return std::exp(acc);
    }
    std::vector<double> cv(e.order + 1);
    for (int k = 0; k <= e.order; ++k) cv[k] = e.c_value_delta(k, t, dz);
    std::vector<double> d = compute_dk(cv);
    double acc = 0.0, tp = 1.0;
    for (double dk : d) {
        acc += dk * tp;
        tp *= t;
    }
    return acc;
}

double KernelApprox::kernel_core_z(const WkbExpansion& e, double t,
                                   std::span<const double> zx) const {
    std::vector<double> dz(n_);
    double q = 0.0;
    for (int i = 0; i < n_; ++i) {
        dz[i] = zx[i] - e.base_point[i];
        q += dz[i] * dz[i];
    }
    const double pi = 3.14159265358979323846;
    double pref = std::pow(4.0 * pi * t, -0.5 * n_) * std::exp(-q / (4.0 * t));
    return pref * series_factor(e, t, dz);
}

double KernelApprox::eval_density(double t, std::span<const double> x) const {
    check_time(t);
    if (masked(x) || masked(base_y_)) return 0.0;
    std::vector<double> zx = to_z(x);
    return sqrt_det_inv_ * kernel_core_z(expansion_, t, zx);
}

namespace {

// Odometer loop over a tensor product of per-axis quadrature rules.
template <typename F>
void tensor_quadrature(const std::vector<QuadratureRule>& rules, F&& body) {
    int n = static_cast<int>(rules.size());
    std::vector<int> idx(n, 0);
    std::vector<double> node(n);
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            node[i] = rules[i].nodes[idx[i]];
            w *= rules[i].weights[idx[i]];
        }
        body(node, w);
        int axis = 0;
        while (axis < n) {
            if (++idx[axis] < static_cast<int>(rules[axis].nodes.size())) break;
            idx[axis] = 0;
            ++axis;
        }
        if (axis == n) break;
    }
}

using ExpansionCache = std::map<std::vector<double>, WkbExpansion>;

const WkbExpansion& cached_expansion(const KernelApprox& k, ExpansionCache& cache,
                                     const std::vector<double>& z) {
    auto it = cache.find(z);
    if (it == cache.end()) it = cache.emplace(z, k.expand_at_z(z)).first;
    return it->second;
}

} // namespace

double cauchy_solve(const KernelApprox& k, double t, std::span<const double> x,
                    const Payoff& f, const QuadratureSpec& quad) {
    k.check_time(t);
    int n = k.dim();
    if (n > 3)
        throw InputError("cauchy_solve: tensor quadrature supports n <= 3; use "
                         "weak_expectation for higher dimensions");
    if (quad.nodes < 1) throw InputError("cauchy_solve: node count must be >= 1");
    std::vector<double> zx = k.to_z(x);
    // window_sigmas counts multiples of the Gaussian std sqrt(2t) in z-space
    double halfw = quad.window_sigmas * std::sqrt(2.0 * t);
    std::vector<QuadratureRule> rules;
    rules.reserve(n);
    for (int i = 0; i < n; ++i)
        rules.push_back(gauss_legendre_on(quad.nodes, zx[i] - halfw, zx[i] + halfw));

    bool x_masked = k.masked(x);
    ExpansionCache cache;
    double acc = 0.0;
    tensor_quadrature(rules, [&](const std::vector<double>& z, double w) {
        std::vector<double> y = k.from_z(z);
        if (x_masked || k.masked(y)) return;
        double fy = f(y);
        if (!std::isfinite(fy))
            throw InputError("cauchy_solve: payoff returned a non-finite value");
        const WkbExpansion& e = cached_expansion(k, cache, z);
        acc += w * k.kernel_core_z(e, t, zx) * fy;
    });
    return acc;
}

double semigroup_compose(const KernelApprox& k, double t1, double t2,
                         std::span<const double> x, std::span<const double> y,
                         const QuadratureSpec& quad) {
    k.check_time(t1);
    k.check_time(t2);
    int n = k.dim();
    if (n > 3) throw InputError("semigroup_compose: tensor quadrature supports n <= 3");
    std::vector<double> zx = k.to_z(x);
    std::vector<double> zy = k.to_z(y);
    double halfw = quad.window_sigmas * std::sqrt(2.0 * std::max(t1, t2));
    std::vector<QuadratureRule> rules;
    rules.reserve(n);
    for (int i = 0; i < n; ++i) {
        double lo = std::min(zx[i], zy[i]) - halfw;
        double hi = std::max(zx[i], zy[i]) + halfw;
        rules.push_back(gauss_legendre_on(quad.nodes, lo, hi));
    }

    WkbExpansion exp_y = k.expand_at_z(zy);
    bool ends_masked = k.masked(x) || k.masked(y);
    ExpansionCache cache;
    double acc = 0.0;
    tensor_quadrature(rules, [&](const std::vector<double>& z, double w) {
        if (ends_masked) return;
        std::vector<double> mid = k.from_z(z);
        if (k.masked(mid)) return;
        const WkbExpansion& e_mid = cached_expansion(k, cache, z);
        double p1 = k.kernel_core_z(e_mid, t1, zx);
        double p2 = k.kernel_core_z(exp_y, t2, z);
        acc += w * p1 * p2;
    });
    double det_factor = k.diffusion() ? 1.0 / std::sqrt(k.diffusion()->det) : 1.0;
    return det_factor * acc;
}

WeakResult weak_expectation(const KernelApprox& k, double t, std::span<const double> x,
                            const Payoff& g, const MonteCarloSpec& mc, std::uint64_t seed) {
    k.check_time(t);
    if (mc.samples <= 0) throw InputError("weak_expectation: sample count must be > 0");
    if (mc.chunk <= 0) throw InputError("weak_expectation: chunk size must be > 0");
    int n = k.dim();
    std::vector<double> zx = k.to_z(x);
    double sigma = std::sqrt(2.0 * t);
    bool x_masked = k.masked(x);

    double sum = 0.0, sumsq = 0.0;
    std::vector<double> z(n), dz(n);
    std::int64_t chunks = (mc.samples + mc.chunk - 1) / mc.chunk;
    std::int64_t done = 0;
    for (std::int64_t c = 0; c < chunks; ++c) {
        NormalStream stream(seed, static_cast<std::uint64_t>(c));
        std::int64_t count = std::min(mc.chunk, mc.samples - done);
        for (std::int64_t m = 0; m < count; ++m) {
            for (int i = 0; i < n; ++i) {
                z[i] = zx[i] + sigma * stream.normal();
                dz[i] = zx[i] - z[i];
            }
            std::vector<double> y = k.from_z(z);
            double v = 0.0;
            if (!x_masked && !k.masked(y)) {
                WkbExpansion e = k.expand_at_z(z);
                std::vector<double> cv(e.order + 1);
                for (int kk = 0; kk <= e.order; ++kk) cv[kk] = e.c_value_delta(kk, t, dz);
                std::vector<double> d = compute_dk(cv);
                double wgt = 0.0, tp = 1.0;
                for (double dk : d) {
                    wgt += dk * tp;
                    tp *= t;
                }
                v = g(y) * wgt;
                if (!std::isfinite(v))
                    throw InputError("weak_expectation: payoff produced non-finite value");
            }
            sum += v;
            sumsq += v * v;
        }
        done += count;
    }
    double m = static_cast<double>(mc.samples);
    WeakResult r;
    r.estimate = sum / m;
    double var = std::max(0.0, (sumsq - sum * sum / m) / std::max(1.0, m - 1.0));
    r.std_error = std::sqrt(var / m);
    return r;
}

} // namespace parex
