#include "thetastrat/lattice.hpp"
#include "thetastrat/linalg.hpp"
#include "thetastrat/polynomial.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace thetastrat;

TEST_CASE("rational parsing is exact") {
    CHECK(parse_rational("3/2") == Rational(3, 2));
    CHECK(parse_rational("-7") == Rational(-7));
    CHECK_THROWS_AS(parse_rational("nonsense"), config_error);
}

TEST_CASE("solve and inverse") {
    QMat m(2, 2);
    m(0, 0) = 2; m(0, 1) = 1; m(1, 0) = 1; m(1, 1) = 1;
    auto inv = inverse(m);
    REQUIRE(inv);
    CHECK(mat_mul(m, *inv) == QMat::identity(2));
    auto x = solve(m, QVec{Rational(3), Rational(2)});
    REQUIRE(x);
    CHECK((*x)[0] == 1);
    CHECK((*x)[1] == 1);
}

TEST_CASE("kernel basis spans the kernel") {
    QMat m(1, 3);
    m(0, 0) = 1; m(0, 1) = 1; m(0, 2) = 1;
    auto k = kernel_basis(m);
    REQUIRE(k.size() == 2);
    for (const auto& v : k) CHECK(is_zero(mat_vec(m, v)));
}

TEST_CASE("smith normal form diagonalizes with divisibility") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> coef(-4, 4);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        ZMat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = coef(rng);
        auto s = smith_normal_form(a);
        // U A V = D
        QMat lhs = mat_mul(to_qmat(s.u), mat_mul(to_qmat(a), to_qmat(s.v)));
        CHECK(lhs == to_qmat(s.d));
        for (int i = 0; i + 1 < n; ++i) {
            if (s.d(i, i) == 0) CHECK(s.d(i + 1, i + 1) == 0);
            else CHECK(s.d(i + 1, i + 1) % s.d(i, i) == 0);
        }
        CHECK(abs(det(to_qmat(s.u))) == 1);
        CHECK(abs(det(to_qmat(s.v))) == 1);
    }
}

TEST_CASE("coset counts match |det| on random nondegenerate matrices") {
    // spec property: 50 random nondegenerate integer matrices of rank <= 3
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> coef(-3, 3);
    int done = 0;
    while (done < 50) {
        int n = 1 + static_cast<int>(rng() % 3);
        ZMat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = coef(rng);
        Rational d = det(to_qmat(a));
        if (d == 0) continue;
        auto reps = lattice_coset_representatives(a);
        CHECK(Rational(static_cast<long>(reps.size())) == abs(d));
        // pairwise non-congruent modulo A Z^n: check via U x mod D
        auto s = smith_normal_form(a);
        std::set<std::vector<Int>> canon;
        for (const auto& r : reps) {
            std::vector<Int> key(n);
            for (int i = 0; i < n; ++i) {
                Int acc = 0;
                for (int j = 0; j < n; ++j) acc += s.u(i, j) * r[j];
                Int m = s.d(i, i);
                key[i] = acc - floor_div(acc, m) * m;
            }
            CHECK(canon.insert(key).second);
        }
        ++done;
    }
}

TEST_CASE("integer kernel is saturated") {
    ZMat a(1, 2);
    a(0, 0) = 2; a(0, 1) = -2;
    auto k = integer_kernel(a);
    REQUIRE(k.size() == 1);
    // saturated generator is (1,1) up to sign, not (2,2)
    CHECK(boost::multiprecision::abs(k[0][0]) == 1);
    CHECK(k[0][0] == k[0][1]);
}

TEST_CASE("char poly and sturm root enclosures") {
    QMat m(2, 2);
    m(0, 0) = 2; m(0, 1) = 0; m(1, 0) = 0; m(1, 1) = -3;
    QPoly p = char_poly(m);
    // (x-2)(x+3) = x^2 + x - 6
    REQUIRE(p.degree() == 2);
    CHECK(p.c[0] == -6);
    CHECK(p.c[1] == 1);
    CHECK(p.c[2] == 1);
    Rational tol(1, 1000000000000LL);
    auto mx = max_real_root(p, tol);
    REQUIRE(mx);
    CHECK(mx->lo <= 2);
    CHECK(mx->hi >= 2);
    CHECK(mx->width() <= tol);
    Interval nrm = max_abs_root(p, tol);
    CHECK(nrm.lo <= 3);
    CHECK(nrm.hi >= 3);
}

TEST_CASE("definiteness classification") {
    QMat pd = QMat::identity(3);
    CHECK(classify_form(pd) == Definiteness::positive);
    QMat nd = mat_scale(Rational(-2), QMat::identity(2));
    CHECK(classify_form(nd) == Definiteness::negative);
    QMat psd(2, 2);
    psd(0, 0) = 1;  // diag(1, 0)
    CHECK(classify_form(psd) == Definiteness::positive_semi);
    QMat indef(2, 2);
    indef(0, 0) = 1; indef(1, 1) = -1;
    CHECK(classify_form(indef) == Definiteness::indefinite);
}
