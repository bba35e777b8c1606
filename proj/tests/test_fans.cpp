#include "thetastrat/fans.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace thetastrat;

TEST_CASE("chamber cones for A1 and GL1") {
    RootDatum a1 = root_datum_A1();
    Cone borel = chamber_cone(a1, ParabolicType::borel(a1));
    CHECK(borel.cone_dim() == 1);
    CHECK(borel.contains(a1.simple_coroots[0]));
    CHECK_FALSE(borel.contains(-a1.simple_coroots[0]));

    Cone full = chamber_cone(a1, ParabolicType::full_group());
    CHECK(full.cone_dim() == 0);
    CHECK(full.contains(QVec{Rational(0)}));

    RootDatum gl1 = root_datum_preset("GL1");
    Cone line = chamber_cone(gl1, ParabolicType::full_group());
    CHECK(line.cone_dim() == 1);
    CHECK(line.contains(QVec{Rational(5)}));
    CHECK(line.contains(QVec{Rational(-5)}));
}

TEST_CASE("tau chamber contains sigma chamber") {
    RootDatum a2 = root_datum_preset("A2");
    ParabolicType b = ParabolicType::borel(a2);
    Cone sigma = chamber_cone(a2, b, false);
    Cone tau = chamber_cone(a2, b, true);
    for (const auto& r : sigma.positive_generators()) CHECK(tau.contains(r));
}

TEST_CASE("Sigma_X for GL1 with weight +1: three cones") {
    RootDatum gl1 = root_datum_preset("GL1");
    WeightedRep x;
    x.add(QVec{Rational(1)}, Int(1));
    Fan f = build_sigma_X(gl1, x);
    CHECK(f.cones.size() == 3);
    const Cone& c0 = f.minimal_cone_containing(QVec{Rational(0)});
    CHECK(c0.cone_dim() == 0);
    const Cone& cneg = f.minimal_cone_containing(QVec{Rational(-2)});
    CHECK(cneg.cone_dim() == 1);
    CHECK(cneg.contains(QVec{Rational(-1)}));
    CHECK_FALSE(cneg.contains(QVec{Rational(1)}));
}

TEST_CASE("Sigma_X for GL1 with weights {+1,-1} is the same three cones") {
    RootDatum gl1 = root_datum_preset("GL1");
    WeightedRep x;
    x.add(QVec{Rational(1)}, Int(1));
    x.add(QVec{Rational(-1)}, Int(1));
    Fan f = build_sigma_X(gl1, x);
    CHECK(f.cones.size() == 3);
}

TEST_CASE("Sigma_0 for A1 is the face fan of the dominant chamber") {
    RootDatum a1 = root_datum_A1();
    Fan f = build_sigma_X(a1, WeightedRep{});
    CHECK(f.cones.size() == 2);  // {0} and the dominant ray
    const Cone& ray = f.minimal_cone_containing(a1.simple_coroots[0]);
    CHECK(ray.cone_dim() == 1);
}

TEST_CASE("projection onto span: worked cases and idempotence") {
    QuadForm b = QuadForm::identity(2);
    Cone xaxis = cone_from_generators(2, {QVec{Rational(1), Rational(0)}}, {});
    QVec v{Rational(3), Rational(4)};
    QVec p = project_onto_span(xaxis, v, b);
    CHECK(p == (QVec{Rational(3), Rational(0)}));
    CHECK(project_onto_span(xaxis, p, b) == p);

    Cone zero = cone_from_generators(2, {}, {});
    CHECK(is_zero(project_onto_span(zero, v, b)));

    // already in span
    CHECK(project_onto_span(xaxis, QVec{Rational(-7), Rational(0)}, b) ==
          (QVec{Rational(-7), Rational(0)}));
}

TEST_CASE("projection residual is b-orthogonal to the span") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> coef(-4, 4);
    QMat bm(3, 3);
    bm(0, 0) = 2; bm(1, 1) = 1; bm(2, 2) = 3; bm(0, 1) = bm(1, 0) = 1;
    QuadForm b(bm);
    Cone c = cone_from_generators(
        3, {QVec{Rational(1), Rational(0), Rational(1)}, QVec{Rational(0), Rational(1), Rational(0)}}, {});
    for (int t = 0; t < 50; ++t) {
        QVec v{Rational(coef(rng)), Rational(coef(rng)), Rational(coef(rng))};
        QVec p = project_onto_span(c, v, b);
        for (const auto& s : c.span) CHECK(b.inner(v - p, s) == 0);
        CHECK(project_onto_span(c, p, b) == p);
    }
}

TEST_CASE("minimal cone agrees with exhaustive membership on random points") {
    // spec invariant: 200 random rational points
    RootDatum gl1 = root_datum_preset("GL1");
    WeightedRep x;
    x.add(QVec{Rational(1)}, Int(1));
    Fan f = build_sigma_X(gl1, x);
    std::mt19937 rng(4711);
    std::uniform_int_distribution<int> num(-20, 20);
    std::uniform_int_distribution<int> den(1, 7);
    for (int t = 0; t < 200; ++t) {
        QVec v{Rational(num(rng), den(rng))};
        auto idx = f.minimal_cone_index(v);
        REQUIRE(idx);
        // the minimal cone is contained in every cone containing v
        for (const auto& c : f.cones) {
            if (!c.contains(v)) continue;
            for (const auto& g : f.cones[*idx].positive_generators()) CHECK(c.contains(g));
        }
    }
}

TEST_CASE("cone round-trip: halfspaces -> generators -> same cone") {
    // first quadrant in an ambient 3-space, embedded in the xy-plane
    std::vector<QVec> span = {QVec{Rational(1), Rational(0), Rational(0)},
                              QVec{Rational(0), Rational(1), Rational(0)}};
    std::vector<QVec> hs = {QVec{Rational(1), Rational(0), Rational(0)},
                            QVec{Rational(0), Rational(1), Rational(0)}};
    Cone c = cone_from_halfspaces(3, span, hs);
    CHECK(c.cone_dim() == 2);
    CHECK(c.rays.size() == 2);
    Cone c2 = cone_from_generators(3, c.rays, c.lineality);
    CHECK(c.same_cone(c2));
    CHECK(c.in_relative_interior(QVec{Rational(1), Rational(1), Rational(0)}));
    CHECK_FALSE(c.in_relative_interior(QVec{Rational(1), Rational(0), Rational(0)}));
    CHECK(c.contains(QVec{Rational(1), Rational(0), Rational(0)}));
}
