#include "thetastrat/series.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace thetastrat;

namespace {

struct PrecisionGuard {
    PrecisionGuard() { set_precision_bits(128); }
};
PrecisionGuard guard;

Truncation tr_t(int kt) { return Truncation{.t_order = kt, .s_order = 2}; }

Monomial t_mono(int k) {
    Monomial m;
    m.t = k;
    return m;
}

bool near(const Cplx& a, const Rational& b, double tol = 1e-30) {
    return (a - Cplx(from_rational(b))).abs() < Real(tol);
}

}  // namespace

TEST_CASE("ring arithmetic and truncation drop") {
    Truncation tr = tr_t(2);
    auto one = TruncatedSeries::one(tr);
    auto t = TruncatedSeries::monomial(t_mono(1), Cplx(1), tr);
    auto a = one + t;
    auto b = one - t;
    auto prod = a * b;  // 1 - t^2 at K_t = 2
    CHECK(near(prod.coefficient(Monomial{}), 1));
    CHECK(near(prod.coefficient(t_mono(1)), 0));
    CHECK(near(prod.coefficient(t_mono(2)), -1));

    // t^{K+1} terms are absent
    auto t2 = TruncatedSeries::monomial(t_mono(2), Cplx(1), tr);
    CHECK((t * t2).is_zero());

    // z-monomial exponents add
    Truncation trz{.t_order = 4, .s_order = 2};
    Monomial za, zb;
    za.z = {Rational(1)};
    zb.z = {Rational(-3, 2)};
    auto sa = TruncatedSeries::monomial(za, Cplx(2), trz);
    auto sb = TruncatedSeries::monomial(zb, Cplx(3), trz);
    auto sp = sa * sb;
    Monomial zc;
    zc.z = {Rational(-1, 2)};
    CHECK(near(sp.coefficient(zc), 6));
}

TEST_CASE("ring axioms on randomized series") {
    std::mt19937 rng(5150);
    std::uniform_int_distribution<int> coef(-4, 4);
    Truncation tr = tr_t(5);
    auto rand_series = [&]() {
        TruncatedSeries x(tr);
        for (int k = 0; k <= 5; ++k)
            x = x + TruncatedSeries::monomial(t_mono(k), Cplx(Real(coef(rng))), tr);
        return x;
    };
    Real tol = Real("1e-30");
    for (int trial = 0; trial < 20; ++trial) {
        auto a = rand_series(), b = rand_series(), c = rand_series();
        auto assoc = (a * b) * c - a * (b * c);
        for (const auto& [m, v] : assoc.terms) CHECK(v.abs() < tol);
        auto distr = a * (b + c) - (a * b + a * c);
        for (const auto& [m, v] : distr.terms) CHECK(v.abs() < tol);
    }
}

TEST_CASE("log, inverse, exp round-trips") {
    Truncation tr = tr_t(3);
    auto t = TruncatedSeries::monomial(t_mono(1), Cplx(1), tr);

    // log(1 - t) = -t - t^2/2 - t^3/3
    auto lg = series_log1p(-t);
    CHECK(near(lg.coefficient(t_mono(1)), -1));
    CHECK(near(lg.coefficient(t_mono(2)), Rational(-1, 2)));
    CHECK(near(lg.coefficient(t_mono(3)), Rational(-1, 3)));

    // (1 + t)^{-1} = 1 - t + t^2 - t^3
    auto inv = (TruncatedSeries::one(tr) + t).inverse();
    CHECK(near(inv.coefficient(t_mono(1)), -1));
    CHECK(near(inv.coefficient(t_mono(2)), 1));
    CHECK(near(inv.coefficient(t_mono(3)), -1));

    // exp(log(1 + 2t)) = 1 + 2t exactly to order
    auto x = TruncatedSeries::monomial(t_mono(1), Cplx(2), tr);
    auto rt = series_exp(series_log1p(x)) - (TruncatedSeries::one(tr) + x);
    for (const auto& [m, v] : rt.terms) CHECK(v.abs() < Real("1e-30"));

    // negative powers
    auto p = (TruncatedSeries::one(tr) + t).pow(-2);
    CHECK(near(p.coefficient(t_mono(1)), -2));
    CHECK(near(p.coefficient(t_mono(2)), 3));

    CHECK_THROWS_AS(TruncatedSeries(tr).inverse(), precondition_error);
    CHECK_THROWS_AS(series_log1p(TruncatedSeries::one(tr)), precondition_error);
}

TEST_CASE("series matrix determinant multiplicativity") {
    Truncation tr = tr_t(3);
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> coef(-2, 2);
    auto rand_mat = [&](int n) {
        SeriesMatrix m(n, tr);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                m(i, j) = TruncatedSeries::constant(Cplx(Real(coef(rng))), tr);
                for (int k = 1; k <= 2; ++k)
                    m(i, j) = m(i, j) + TruncatedSeries::monomial(t_mono(k), Cplx(Real(coef(rng))), tr);
            }
        return m;
    };
    for (int trial = 0; trial < 5; ++trial) {
        SeriesMatrix a = rand_mat(2), b = rand_mat(2);
        SeriesMatrix ab(2, tr);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) ab(i, j) = ab(i, j) + a(i, k) * b(k, j);
        auto lhs = ab.det();
        auto rhs = a.det() * b.det();
        auto diff = lhs - rhs;
        for (const auto& [m, v] : diff.terms) CHECK(v.abs() < Real("1e-28"));
    }
}

TEST_CASE("fixed point: zero perturbation returns the base point") {
    Truncation tr = tr_t(6);
    auto f = [&](const SeriesVector& xi) { return SeriesVector{xi[0].scaled(Cplx(2))}; };
    QMat j0(1, 1);
    j0(0, 0) = 2;
    SeriesVector xi = solve_fixed_point(f, j0, 1, tr);
    CHECK(xi[0].is_zero());
}

TEST_CASE("fixed point: 1-D logarithmic example 2 xi + t e^xi = 0") {
    Truncation tr = tr_t(6);
    auto t = TruncatedSeries::monomial(t_mono(1), Cplx(1), tr);
    auto f = [&](const SeriesVector& xi) {
        return SeriesVector{xi[0].scaled(Cplx(2)) + t * series_exp(xi[0])};
    };
    QMat j0(1, 1);
    j0(0, 0) = 2;
    SeriesVector xi = solve_fixed_point(f, j0, 1, tr);
    // xi = -t/2 + t^2/4 - ...
    CHECK(near(xi[0].coefficient(t_mono(1)), Rational(-1, 2)));
    CHECK(near(xi[0].coefficient(t_mono(2)), Rational(1, 4)));
    // residual identically below the floor through the truncation order
    auto resid = f(xi);
    for (const auto& [m, c] : resid[0].terms) CHECK(c.abs() < Real("1e-25"));
}

TEST_CASE("raising the truncation extends but never changes low coefficients") {
    auto solve_at = [&](int kt) {
        Truncation tr = tr_t(kt);
        auto t = TruncatedSeries::monomial(t_mono(1), Cplx(1), tr);
        auto f = [&](const SeriesVector& xi) {
            return SeriesVector{xi[0].scaled(Cplx(2)) + t * series_exp(xi[0])};
        };
        QMat j0(1, 1);
        j0(0, 0) = 2;
        return solve_fixed_point(f, j0, 1, tr)[0];
    };
    auto lo = solve_at(8);
    auto hi = solve_at(12);
    for (int k = 0; k <= 8; ++k) {
        Cplx a = lo.coefficient(t_mono(k));
        Cplx b = hi.coefficient(t_mono(k));
        CHECK((a - b).abs() < Real("1e-25"));
    }
}

TEST_CASE("non-convergent fixed point raises") {
    Truncation tr = tr_t(4);
    // F with the wrong Jacobian cannot double the valuation
    auto t = TruncatedSeries::monomial(t_mono(1), Cplx(1), tr);
    auto f = [&](const SeriesVector& xi) {
        return SeriesVector{TruncatedSeries::one(tr) + xi[0]};  // F(0) has a constant term
    };
    QMat j0(1, 1);
    j0(0, 0) = 1;
    // constant-term residual: converges in one step actually; use a genuinely
    // inconsistent system instead: F = 1 (independent of xi)
    auto g = [&](const SeriesVector&) { return SeriesVector{TruncatedSeries::one(tr)}; };
    CHECK_THROWS_AS(solve_fixed_point(g, j0, 1, tr), precondition_error);
    (void)f;
}
