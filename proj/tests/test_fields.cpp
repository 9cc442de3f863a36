#include <doctest.h>

#include <cmath>
#include <random>

#include "parex/fields.hpp"

using namespace parex;

namespace {

CoefficientField sine_field(int dim = 1, int freq = 1, double amp = 1.0) {
    FourierTerm t;
    t.freq.assign(dim + 1, 0.0);
    t.freq[1] = freq;
    t.sin_coeff = amp;
    return CoefficientField(FourierField(dim, {t}));
}

CoefficientField const_field(double c, int dim = 1) {
    if (c == 0.0) return CoefficientField(PolyField(dim, {}));
    return CoefficientField(PolyField(dim, {{MultiIndex::zero(dim), c}}));
}

} // namespace

TEST_CASE("evaluate_field on Fourier terms") {
    auto f = sine_field();
    double x[1] = {M_PI / 2.0};
    CHECK(evaluate_field(f, 0.0, x) == doctest::Approx(1.0));

    FourierTerm t;
    t.freq = {0.0, 0.0};
    t.cos_coeff = 3.0;
    CoefficientField c(FourierField(1, {t}));
    double anyx[1] = {1.234};
    CHECK(evaluate_field(c, 0.0, anyx) == doctest::Approx(3.0));
}

TEST_CASE("evaluate_field on polynomials") {
    CoefficientField p(PolyField(1, {{MultiIndex({0}), 1.0}, {MultiIndex({1}), 2.0}}));
    double x[1] = {0.5};
    CHECK(evaluate_field(p, 0.0, x) == doctest::Approx(2.0));
    double wrong[2] = {0.0, 0.0};
    CHECK_THROWS_AS(evaluate_field(p, 0.0, wrong), InputError);
}

TEST_CASE("localize sine at the origin gives the Taylor series") {
    auto f = sine_field();
    double y[1] = {0.0};
    TimePoly loc = localize(f, y, 0.0, 3);
    CHECK(loc.max_time_power() == 0);
    const auto& p = loc.by_power[0];
    CHECK(p.coeff(MultiIndex({0})) == doctest::Approx(0.0));
    CHECK(p.coeff(MultiIndex({1})) == doctest::Approx(1.0));
    CHECK(p.coeff(MultiIndex({2})) == doctest::Approx(0.0));
    CHECK(p.coeff(MultiIndex({3})) == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("localize constants and polynomial shifts") {
    auto c = const_field(2.5);
    double y[1] = {0.7};
    auto loc = localize(c, y, 0.0, 4);
    CHECK(loc.by_power[0].coeff(MultiIndex({0})) == doctest::Approx(2.5));
    CHECK(loc.by_power[0].coeffs().size() == 1);

    CoefficientField sq(PolyField(1, {{MultiIndex({2}), 1.0}}));
    double y1[1] = {1.0};
    auto loc2 = localize(sq, y1, 0.0, 2);
    CHECK(loc2.by_power[0].coeff(MultiIndex({0})) == doctest::Approx(1.0));
    CHECK(loc2.by_power[0].coeff(MultiIndex({1})) == doctest::Approx(2.0));
    CHECK(loc2.by_power[0].coeff(MultiIndex({2})) == doctest::Approx(1.0));
}

TEST_CASE("localize then evaluate agrees with the field to O(|Dx|^{D+1})") {
    std::mt19937 rng(414);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    std::uniform_real_distribution<double> ud(-0.1, 0.1);
    for (int rep = 0; rep < 20; ++rep) {
        FourierTerm t;
        t.freq = {0.0, static_cast<double>(1 + rep % 2)};
        t.sin_coeff = uy(rng);
        t.cos_coeff = uy(rng);
        CoefficientField f(FourierField(1, {t}));
        double yb = uy(rng);
        double y[1] = {yb};
        auto loc = localize(f, y, 0.0, 6);
        for (int s = 0; s < 5; ++s) {
            double dx[1] = {ud(rng)};
            double x[1] = {yb + dx[0]};
            double got = loc.by_power[0].eval_delta(dx);
            double want = evaluate_field(f, 0.0, x);
            CHECK(std::abs(got - want) <= 10.0 * std::pow(0.1, 7));
        }
    }
}

TEST_CASE("localize is linear (property)") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 15; ++rep) {
        double alpha = u(rng), beta = u(rng);
        auto f = sine_field(1, 1, 1.0);
        FourierTerm t2;
        t2.freq = {0.0, 2.0};
        t2.cos_coeff = 1.0;
        CoefficientField g(FourierField(1, {t2}));

        // alpha f + beta g as a single Fourier field
        FourierTerm ta;
        ta.freq = {0.0, 1.0};
        ta.sin_coeff = alpha;
        FourierTerm tb;
        tb.freq = {0.0, 2.0};
        tb.cos_coeff = beta;
        CoefficientField combo(FourierField(1, {ta, tb}));

        double y[1] = {u(rng) / 2.0};
        auto lc = localize(combo, y, 0.0, 8).by_power[0];
        auto lf = localize(f, y, 0.0, 8).by_power[0].scaled(alpha);
        auto lg = localize(g, y, 0.0, 8).by_power[0].scaled(beta);
        auto diff = lc - (lf + lg);
        CHECK(diff.max_abs_coeff() == doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("time-dependent localization carries Dt powers") {
    FourierTerm t;
    t.freq = {1.0, 0.0};  // cos(t), space-constant
    t.cos_coeff = 1.0;
    CoefficientField f(FourierField(1, {t}));
    double y[1] = {0.0};
    auto loc = localize(f, y, 0.0, 4);
    REQUIRE(loc.max_time_power() >= 2);
    CHECK(loc.by_power[0].coeff(MultiIndex({0})) == doctest::Approx(1.0));
    CHECK(loc.by_power[1].coeff(MultiIndex({0})) == doctest::Approx(0.0));
    CHECK(loc.by_power[2].coeff(MultiIndex({0})) == doctest::Approx(-0.5));
}

TEST_CASE("fourier_bounds extracts m0 and the coefficient modulus") {
    FourierTerm t;
    t.freq = {0.0, 1.0};
    t.sin_coeff = 2.0;
    std::vector<CoefficientField> fields{CoefficientField(FourierField(1, {t}))};
    auto b = fourier_bounds(fields);
    CHECK(b.abs_m0 == 1);
    CHECK(b.ebar == doctest::Approx(1.0));
    CHECK(b.term_count_bound == 3);

    std::vector<CoefficientField> zero{CoefficientField(FourierField(1, {}))};
    auto bz = fourier_bounds(zero);
    CHECK(bz.abs_m0 == 0);
    CHECK(bz.ebar == 0.0);

    FourierTerm t1;
    t1.freq = {0.0, 1.0};
    t1.cos_coeff = 2.0;
    FourierTerm t3;
    t3.freq = {0.0, 3.0};
    t3.cos_coeff = 1.0;
    std::vector<CoefficientField> two{CoefficientField(FourierField(1, {t1, t3}))};
    auto b2 = fourier_bounds(two);
    CHECK(b2.abs_m0 == 3);
    CHECK(b2.ebar == doctest::Approx(1.0));

    std::vector<CoefficientField> poly{const_field(1.0)};
    CHECK_THROWS_AS(fourier_bounds(poly), InputError);
}

TEST_CASE("fourier_bounds is invariant under term reordering (property)") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<FourierTerm> terms;
        for (int i = 0; i < 4; ++i) {
            FourierTerm t;
            t.freq = {0.0, static_cast<double>(i % 3)};
            t.sin_coeff = u(rng);
            t.cos_coeff = u(rng);
            terms.push_back(t);
        }
        std::vector<CoefficientField> a{CoefficientField(FourierField(1, terms))};
        std::shuffle(terms.begin(), terms.end(), rng);
        std::vector<CoefficientField> b{CoefficientField(FourierField(1, terms))};
        auto ba = fourier_bounds(a), bb = fourier_bounds(b);
        CHECK(ba.abs_m0 == bb.abs_m0);
        CHECK(ba.ebar == doctest::Approx(bb.ebar));
    }
}

TEST_CASE("freeze fixes coordinates in both representations") {
    // sin(x1 + 2 x2) frozen at x2 = pi/4
    FourierTerm t;
    t.freq = {0.0, 1.0, 2.0};
    t.sin_coeff = 1.0;
    CoefficientField f(FourierField(2, {t}));
    int keep[1] = {0};
    double at[2] = {0.0, M_PI / 4.0};
    auto g = freeze(f, keep, at);
    CHECK(g.dim() == 1);
    for (double x : {-0.3, 0.1, 0.8}) {
        double full[2] = {x, M_PI / 4.0};
        double red[1] = {x};
        CHECK(evaluate_field(g, 0.0, red) ==
              doctest::Approx(evaluate_field(f, 0.0, full)).epsilon(1e-13));
    }

    // x1 * x2^2 frozen at x2 = 3
    CoefficientField p(PolyField(2, {{MultiIndex({1, 2}), 1.0}}));
    double at2[2] = {0.0, 3.0};
    auto q = freeze(p, keep, at2);
    double red[1] = {2.0};
    CHECK(evaluate_field(q, 0.0, red) == doctest::Approx(18.0));
}

TEST_CASE("linear_pushforward preserves field values") {
    // 2x2 transform, Fourier drift
    std::vector<double> L = {2.0, 0.0, 1.0, 1.0};
    std::vector<double> Linv = {0.5, 0.0, -0.5, 1.0};
    FourierTerm t;
    t.freq = {0.0, 1.0, -1.0};
    t.sin_coeff = 0.7;
    t.cos_coeff = -0.2;
    std::vector<CoefficientField> drift{CoefficientField(FourierField(2, {t})),
                                        CoefficientField(FourierField(2, {t}))};
    auto pushed = linear_pushforward(drift, L, Linv, 2);
    REQUIRE(pushed.size() == 2);
    double z[2] = {0.4, -0.9};
    double x[2] = {L[0] * z[0] + L[1] * z[1], L[2] * z[0] + L[3] * z[1]};
    for (int k = 0; k < 2; ++k) {
        double want = 0.0;
        for (int i = 0; i < 2; ++i)
            want += Linv[k * 2 + i] * evaluate_field(drift[i], 0.0, x);
        CHECK(evaluate_field(pushed[k], 0.0, z) == doctest::Approx(want).epsilon(1e-13));
    }

    // polynomial drift under the same transform
    std::vector<CoefficientField> pd{
        CoefficientField(PolyField(2, {{MultiIndex({2, 0}), 1.0}})),
        CoefficientField(PolyField(2, {{MultiIndex({1, 1}), 1.0}}))};
    auto pp = linear_pushforward(pd, L, Linv, 2);
    for (int k = 0; k < 2; ++k) {
        double want = 0.0;
        for (int i = 0; i < 2; ++i)
            want += Linv[k * 2 + i] * evaluate_field(pd[i], 0.0, x);
        CHECK(evaluate_field(pp[k], 0.0, z) == doctest::Approx(want).epsilon(1e-12));
    }
}
