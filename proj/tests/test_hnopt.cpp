#include "thetastrat/hnopt.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace thetastrat;

namespace {

Cone full_space(int n) {
    std::vector<QVec> lines;
    for (int i = 0; i < n; ++i) {
        QVec e(n, Rational(0));
        e[i] = 1;
        lines.push_back(e);
    }
    return cone_from_generators(n, {}, lines);
}

Cone first_quadrant(int n) {
    std::vector<QVec> rays;
    for (int i = 0; i < n; ++i) {
        QVec e(n, Rational(0));
        e[i] = 1;
        rays.push_back(e);
    }
    return cone_from_generators(n, rays, {});
}

}  // namespace

TEST_CASE("linear objective on the full space maximizes at l^dagger") {
    QuadForm b = QuadForm::identity(2);
    QVec lf{Rational(3), Rational(-2)};
    auto l = PiecewiseLinearConcave::linear(lf);
    OptResult r = max_quadratic_on_cone(l, b, full_space(2));
    CHECK(r.maximizer == dagger(lf, b));
    CHECK(verify_certificate(r, l, b, full_space(2)));
    CHECK_FALSE(r.boundary);
}

TEST_CASE("boundary clamp in one dimension") {
    QuadForm b = QuadForm::identity(1);
    Cone ray = cone_from_generators(1, {QVec{Rational(1)}}, {});
    auto l = PiecewiseLinearConcave::linear(QVec{Rational(-3)});
    OptResult r = max_quadratic_on_cone(l, b, ray);
    CHECK(is_zero(r.maximizer));
    CHECK(r.value == 0);
    CHECK(r.boundary);
    CHECK(verify_certificate(r, l, b, ray));
}

TEST_CASE("piecewise min(w1,w2) on the first quadrant: w* = (1/2, 1/2)") {
    // derived via the grid oracle below, then fixed by the exact KKT answer
    QuadForm b = QuadForm::identity(2);
    Cone quad = first_quadrant(2);
    PiecewiseLinearConcave l;
    l.blocks.push_back({Rational(1),
                        {QVec{Rational(1), Rational(0)}, QVec{Rational(0), Rational(1)}}});
    OptResult r = max_quadratic_on_cone(l, b, quad);
    CHECK(r.maximizer == (QVec{Rational(1, 2), Rational(1, 2)}));
    CHECK(r.value == Rational(1, 4));
    CHECK(verify_certificate(r, l, b, quad));
    auto verdict = oracles::grid_check(l, b, quad, r, Rational(1, 128) * (1 + Rational(1)));
    CHECK(verdict.dominated);
    CHECK(verdict.close);
}

TEST_CASE("ratio maximization") {
    QuadForm b = QuadForm::identity(2);
    Cone quad = first_quadrant(2);

    SECTION("interior linear functional: mu^2 = |l^dagger|^2") {
        QVec lf{Rational(2), Rational(1)};
        auto l = PiecewiseLinearConcave::linear(lf);
        RatioResult r = max_ratio_on_cone(l, b, quad);
        CHECK(r.positive);
        CHECK(r.mu_squared == 5);
        // maximizer direction proportional to l^dagger
        CHECK(r.opt.maximizer == dagger(lf, b));
    }

    SECTION("nonpositive objective reports the flag with witnesses") {
        auto l = PiecewiseLinearConcave::linear(QVec{Rational(-1), Rational(-1)});
        RatioResult r = max_ratio_on_cone(l, b, quad);
        CHECK_FALSE(r.positive);
        for (const auto& wv : r.nonpositivity_witnesses) CHECK(l.value(wv) <= 0);
    }

    SECTION("piecewise example: mu^2 = 1/2") {
        PiecewiseLinearConcave l;
        l.blocks.push_back({Rational(1),
                            {QVec{Rational(1), Rational(0)}, QVec{Rational(0), Rational(1)}}});
        RatioResult r = max_ratio_on_cone(l, b, quad);
        CHECK(r.positive);
        CHECK(r.mu_squared == Rational(1, 2));
    }
}

TEST_CASE("scale behavior of linear objectives") {
    QuadForm b = QuadForm::identity(2);
    Cone quad = first_quadrant(2);
    QVec lf{Rational(1), Rational(2)};
    for (int tau = 1; tau <= 4; ++tau) {
        auto l = PiecewiseLinearConcave::linear(Rational(tau) * lf);
        OptResult r = max_quadratic_on_cone(l, b, quad);
        // w*_tau = tau * l^dagger, value = tau^2/2 |w*_1|^2
        CHECK(r.maximizer == Rational(tau) * dagger(lf, b));
        CHECK(r.value == Rational(tau * tau) * b.norm_sq(dagger(lf, b)) / 2);
        RatioResult rr = max_ratio_on_cone(l, b, quad);
        CHECK(rr.opt.maximizer == Rational(tau) * dagger(lf, b));  // direction invariant
    }
}

TEST_CASE("hn_over_fan picks the positive ray and breaks ties by id") {
    QuadForm b = QuadForm::identity(1);
    Cone pos = cone_from_generators(1, {QVec{Rational(1)}}, {});
    Cone neg = cone_from_generators(1, {QVec{Rational(-1)}}, {});
    auto lplus = PiecewiseLinearConcave::linear(QVec{Rational(1)});
    std::vector<std::pair<Cone, PiecewiseLinearConcave>> cones = {{neg, lplus}, {pos, lplus}};
    FanOptResult r = hn_over_fan(cones, b);
    CHECK(r.cone_id == 1);
    CHECK(r.ratio.positive);
    CHECK(r.ratio.mu_squared == 1);

    // single cone delegates
    FanOptResult single = hn_over_fan({{pos, lplus}}, b);
    CHECK(single.cone_id == 0);
    CHECK(single.ratio.mu_squared == max_ratio_on_cone(lplus, b, pos).mu_squared);

    CHECK_THROWS_AS(hn_over_fan({}, b), precondition_error);
}

TEST_CASE("movement bound: worked cases") {
    QuadForm b = QuadForm::identity(1);
    Cone line = full_space(1);
    QVec zero{Rational(0)};
    std::vector<QVec> gen = {QVec{Rational(-1)}};

    SECTION("delta = gamma gives zero movement") {
        auto mc = movement_bound_check(zero, {}, gen, {Rational(0), Rational(1, 2)},
                                       {Rational(0), Rational(1, 2)}, b, line);
        CHECK(mc.ratio_sq == 0);
    }

    SECTION("single functional: the maximizer moves at exactly the bound") {
        auto mc = movement_bound_check(zero, {}, gen, {Rational(0), Rational(0)},
                                       {Rational(0), Rational(1)}, b, line);
        CHECK(mc.w_delta == (QVec{Rational(0)}));
        CHECK(mc.w_gamma == (QVec{Rational(-1)}));
        CHECK(mc.ratio_sq == 1);
        CHECK(mc.bound_sq == 1);
    }
}

TEST_CASE("movement bound holds on random 2-D instances") {
    // spec invariant: ratio <= c on 100 trials
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> den(1, 4);
    QuadForm b = QuadForm::identity(2);
    Cone plane = full_space(2);
    for (int trial = 0; trial < 100; ++trial) {
        QVec lin{Rational(coef(rng)), Rational(coef(rng))};
        std::vector<QVec> mrk, gen;
        for (int i = 0; i < 2; ++i) mrk.push_back(QVec{Rational(coef(rng)), Rational(coef(rng))});
        for (int i = 0; i < 3; ++i) gen.push_back(QVec{Rational(coef(rng)), Rational(coef(rng))});
        std::pair<Rational, Rational> d{Rational(coef(rng) + 4, den(rng)), Rational(coef(rng) + 4, den(rng))};
        std::pair<Rational, Rational> g{Rational(coef(rng) + 4, den(rng)), Rational(coef(rng) + 4, den(rng))};
        auto mc = movement_bound_check(lin, mrk, gen, d, g, b, plane);
        CHECK(mc.ratio_sq <= mc.bound_sq);
    }
}

TEST_CASE("KKT certificates verify and dominate grids on random instances") {
    std::mt19937 rng(20250809);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> rank_d(1, 3);
    int done = 0;
    while (done < 25) {
        int n = rank_d(rng);
        QuadForm b = QuadForm::identity(n);
        std::vector<QVec> hs;
        int nh = 1 + static_cast<int>(rng() % 5);
        for (int i = 0; i < nh; ++i) {
            QVec h(n);
            for (int j = 0; j < n; ++j) h[j] = coef(rng);
            if (!is_zero(h)) hs.push_back(h);
        }
        std::vector<QVec> span;
        for (int i = 0; i < n; ++i) {
            QVec e(n, Rational(0));
            e[i] = 1;
            span.push_back(e);
        }
        Cone cone = cone_from_halfspaces(n, span, hs);
        PiecewiseLinearConcave l;
        int pieces = 1 + static_cast<int>(rng() % 4);
        PLCBlock blk{Rational(1), {}};
        for (int p = 0; p < pieces; ++p) {
            QVec f(n);
            for (int j = 0; j < n; ++j) f[j] = coef(rng);
            blk.functionals.push_back(f);
        }
        l.blocks.push_back(blk);
        OptResult r = max_quadratic_on_cone(l, b, cone);
        CHECK(verify_certificate(r, l, b, cone));
        Rational lnorm_sq = 0;
        for (const auto& f : blk.functionals) {
            Rational q = functional_norm_sq(f, b);
            if (q > lnorm_sq) lnorm_sq = q;
        }
        auto verdict = oracles::grid_check(l, b, cone, r, Rational(1, 128) * (1 + lnorm_sq));
        CHECK(verdict.dominated);
        CHECK(verdict.close);
        ++done;
    }
}

TEST_CASE("GL1 vortex model over the fan matches a brute-force lattice scan") {
    // degeneration-fan model for the vortex numerical invariant: one cone
    // (the full line N_R for the torus) with l(w) = (phi_V(d) + chi^dagger, w)
    QuadForm b = QuadForm::identity(1);
    Cone line = full_space(1);
    for (long chiv : {-3L, -5L}) {
        for (long d = -4; d <= 4; ++d) {
            QVec lf{Rational(d + chiv)};  // phi_V = 1, chi^dagger = chi
            auto l = PiecewiseLinearConcave::linear(lf);
            FanOptResult r = hn_over_fan({{line, l}}, b);
            // oracle: scan integer lambda with |lambda| <= 50
            Rational best_sq = 0;
            bool any_positive = false;
            for (long lam = -50; lam <= 50; ++lam) {
                if (lam == 0) continue;
                Rational val = Rational(lam) * lf[0];
                if (val <= 0) continue;
                any_positive = true;
                Rational ratio_sq = val * val / Rational(lam * lam);
                if (ratio_sq > best_sq) best_sq = ratio_sq;
            }
            CHECK(r.ratio.positive == any_positive);
            if (any_positive) CHECK(r.ratio.mu_squared == best_sq);
        }
    }
}

TEST_CASE("distance-to-cone estimate on seeded points") {
    // lemma: membership survives moving w1 -> w2 after shrinking h by
    // c1 * |w2 - w1|_b with c1 the max simple-root operator norm
    RootDatum a2 = root_datum_preset("A2");
    QMat bm = QMat::identity(2);
    QuadForm b(bm);
    ParabolicType borel = ParabolicType::borel(a2);
    Cone sigma = chamber_cone(a2, borel);
    QVec rho = borel.rho_coweight(a2);
    Rational c1_sq = 0;
    for (const auto& a : a2.simple_roots) {
        Rational q = functional_norm_sq(a, b);
        if (q > c1_sq) c1_sq = q;
    }
    std::mt19937 rng(31337);
    std::uniform_int_distribution<int> coef(0, 5);
    std::uniform_int_distribution<int> shift(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        Rational h(shift(rng));
        // w1 = h*rho + nonneg combo of chamber generators
        QVec w1 = h * rho;
        for (const auto& g : sigma.positive_generators()) w1 = w1 + Rational(coef(rng)) * g;
        QVec w2 = w1;
        for (auto& q : w2) q += Rational(shift(rng), 2);
        Rational dist_sq = b.norm_sq(w2 - w1);
        // check <w2, alpha_i> >= h - c1 |w2 - w1| for all i in I_P, exactly
        for (int i : borel.index_set) {
            Rational lhs = dot(w2, a2.simple_roots[i]);
            Rational slack = h - lhs;  // need c1*dist >= slack
            bool ok = slack <= 0 || c1_sq * dist_sq >= slack * slack;
            CHECK(ok);
        }
    }
}
