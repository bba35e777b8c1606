#include "thetastrat/quadform.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace thetastrat;

namespace {

QuadForm sl2_norm() {
    QMat b(1, 1);
    b(0, 0) = 2;  // b(a^v, a^v) = 2
    return QuadForm(b);
}

WeightedRep a1_std(const RootDatum& d) {
    WeightedRep v;
    v.add(d.fund_weights[0], Int(1));
    v.add(-d.fund_weights[0], Int(1));
    return v;
}

WeightedRep a1_adjoint(const RootDatum& d) {
    WeightedRep v;
    v.add(d.simple_roots[0], Int(1));
    v.add(QVec{Rational(0)}, Int(1));
    v.add(-d.simple_roots[0], Int(1));
    return v;
}

}  // namespace

TEST_CASE("ch2 of the A1 standard and adjoint representations") {
    RootDatum d = root_datum_A1();
    QuadForm std_form = ch2_form(a1_std(d), d.rank);
    // (a^v, a^v)_std = 1^2 + (-1)^2 = 2
    CHECK(std_form.inner(d.simple_coroots[0], d.simple_coroots[0]) == 2);
    QuadForm ad = ch2_form(a1_adjoint(d), d.rank);
    CHECK(ad.inner(d.simple_coroots[0], d.simple_coroots[0]) == 8);
    CHECK(ch2_form(WeightedRep{}, 1).matrix == QMat::zero(1, 1));
}

TEST_CASE("phi_of on A1: identity for std, 4x for adjoint") {
    RootDatum d = root_datum_A1();
    QuadForm b = sl2_norm();
    SelfMap phi_std = phi_of(ch2_form(a1_std(d), 1), b);
    CHECK(phi_std.matrix == QMat::identity(1));
    SelfMap phi_ad = phi_of(ch2_form(a1_adjoint(d), 1), b);
    CHECK(phi_ad.matrix == mat_scale(Rational(4), QMat::identity(1)));
    SelfMap zero = phi_of(QuadForm(QMat::zero(1, 1)), b);
    CHECK(zero.matrix == QMat::zero(1, 1));
    CHECK(phi_std.is_b_self_adjoint(b));
}

TEST_CASE("pseudoinverse: blockwise inversion and projection identities") {
    QuadForm b = QuadForm::identity(2);
    QMat phi_m(2, 2);
    phi_m(0, 0) = 2;  // diag(2, 0)
    SelfMap phi{phi_m};
    SelfMap plus = pseudoinverse(phi, b);
    QMat expect(2, 2);
    expect(0, 0) = Rational(1, 2);
    CHECK(plus.matrix == expect);

    // invertible map: plain inverse
    QMat inv_m(2, 2);
    inv_m(0, 0) = 2; inv_m(0, 1) = 1; inv_m(1, 0) = 1; inv_m(1, 1) = 1;
    QuadForm f(inv_m);
    SelfMap phi2 = phi_of(f, b);
    SelfMap plus2 = pseudoinverse(phi2, b);
    CHECK(mat_mul(plus2.matrix, phi2.matrix) == QMat::identity(2));

    // phi^+ phi = orthogonal projection onto ker(phi)-perp; Penrose identities
    QMat proj = mat_mul(plus.matrix, phi.matrix);
    CHECK(mat_mul(proj, proj) == proj);
    CHECK(mat_mul(phi.matrix, mat_mul(plus.matrix, phi.matrix)) == phi.matrix);
    CHECK(mat_mul(plus.matrix, mat_mul(phi.matrix, plus.matrix)) == plus.matrix);
}

TEST_CASE("pseudoinverse projection is idempotent and b-self-adjoint on random reps") {
    // spec invariant: 100 random reps of rank <= 3
    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> wcoef(-2, 2);
    std::uniform_int_distribution<int> dim_d(1, 3);
    std::uniform_int_distribution<int> cnt_d(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        int n = dim_d(rng);
        QuadForm b = QuadForm::identity(n);
        WeightedRep rep;
        int cnt = cnt_d(rng);
        for (int k = 0; k < cnt; ++k) {
            QVec w(n);
            for (int i = 0; i < n; ++i) w[i] = wcoef(rng);
            rep.add(w, Int(1));
        }
        SelfMap phi = phi_of(ch2_form(rep, n), b);
        SelfMap plus = pseudoinverse(phi, b);
        QMat proj = mat_mul(plus.matrix, phi.matrix);
        CHECK(mat_mul(proj, proj) == proj);
        CHECK(SelfMap{proj}.is_b_self_adjoint(b));
        CHECK(mat_mul(phi.matrix, proj) == phi.matrix);
    }
}

TEST_CASE("dagger: worked examples and the exact round-trip") {
    RootDatum d = root_datum_A1();
    QuadForm b = sl2_norm();
    CHECK(is_zero(dagger(QVec{Rational(0)}, b)));
    // alpha^dagger = alpha^v: solve 2x = <alpha^v, alpha> = 2
    QVec ad = dagger(d.simple_roots[0], b);
    CHECK(ad == d.simple_coroots[0]);

    QuadForm id2 = QuadForm::identity(2);
    QVec chi{Rational(3), Rational(-5)};
    CHECK(dagger(chi, id2) == chi);

    // lowering map round-trip: (chi^dagger)_flat = chi
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coef(-5, 5);
    for (int t = 0; t < 30; ++t) {
        QVec c{Rational(coef(rng)), Rational(coef(rng))};
        QVec up = dagger(c, id2);
        CHECK(mat_vec(id2.matrix, up) == c);
    }
}

TEST_CASE("W-invariance of ch2 forms for W-stable reps") {
    RootDatum d = root_datum_preset("A2");
    WeightedRep ad;
    for (const auto& a : d.all_roots()) ad.add(a, Int(1));
    REQUIRE(ad.is_weyl_stable(d));
    QuadForm f = ch2_form(ad, d.rank);
    CHECK(f.is_weyl_invariant(d));
    // a non-stable rep generically is not invariant
    WeightedRep skew;
    skew.add(d.simple_roots[0], Int(1));
    QuadForm g = ch2_form(skew, d.rank);
    CHECK_FALSE(g.is_weyl_invariant(d));
}

TEST_CASE("operator norm enclosures via Sturm bisection") {
    QuadForm b = QuadForm::identity(2);
    QMat m(2, 2);
    m(0, 0) = 3; m(1, 1) = -4;
    Interval nrm = operator_norm_enclosure(SelfMap{m}, Rational(1, 1000000000000LL));
    CHECK(nrm.lo <= 4);
    CHECK(nrm.hi >= 4);
    CHECK(nrm.width() <= Rational(1, 1000000000));
}

TEST_CASE("c_XV: torus examples from the worked cases") {
    RootDatum gl1 = root_datum_preset("GL1");
    QuadForm b = QuadForm::identity(1);
    WeightedRep x;
    x.add(QVec{Rational(1)}, Int(1));
    WeightedRep v = x;

    // X = 0 for a torus: T^{lambda<0} is empty, c = 0
    Interval zero = c_XV(WeightedRep{}, gl1, v, b);
    CHECK(zero.lo == 0);
    CHECK(zero.hi == 0);

    // X weight 1, V weight 1: |phi_V^+| = 1, |phi_{X^{lambda<0}}| = 1
    Interval one = c_XV(x, gl1, v, b);
    CHECK(one.lo <= 1);
    CHECK(one.hi >= 1);
    CHECK(one.hi - one.lo <= Rational(1, 1000000000));

    // V -> V + V halves the constant: phi_{V^2} = 2 phi_V exactly
    WeightedRep v2 = v.scaled(Int(2));
    Interval half = c_XV(x, gl1, v2, b);
    CHECK(half.lo <= Rational(1, 2));
    CHECK(half.hi >= Rational(1, 2));

    // exact statement behind it: pseudoinverse of the doubled form is half
    SelfMap p1 = pseudoinverse(phi_of(ch2_form(v, 1), b), b);
    SelfMap p2 = pseudoinverse(phi_of(ch2_form(v2, 1), b), b);
    CHECK(p2.matrix == mat_scale(Rational(1, 2), p1.matrix));
}

TEST_CASE("sign-pattern feasibility: faces of a rank-2 arrangement") {
    std::vector<QVec> fs = {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
    CHECK(sign_pattern_feasible(fs, {1, 1}, 2));
    CHECK(sign_pattern_feasible(fs, {1, -1}, 2));
    CHECK(sign_pattern_feasible(fs, {0, 1}, 2));
    CHECK(sign_pattern_feasible(fs, {0, 0}, 2));
    // x > 0 and -x > 0 cannot hold
    std::vector<QVec> contra = {{Rational(1), Rational(0)}, {Rational(-1), Rational(0)}};
    CHECK_FALSE(sign_pattern_feasible(contra, {1, 1}, 2));
}
