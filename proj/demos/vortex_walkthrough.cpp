// Walks one GL1 vortex configuration end to end: the weight fan, the
// chi-active strata with shifted characters, and the recursive index at a
// fixed degree.

#include "thetastrat/ggw.hpp"

#include <iostream>

using namespace thetastrat;

int main() {
    set_precision_bits(128);
    RootDatum gl1 = root_datum_torus(1);
    WeightedRep x, v, u_prime;
    x.add(QVec{Rational(1)}, Int(1));
    v.add(QVec{Rational(1)}, Int(1));
    v.add(QVec{Rational(2)}, Int(1));
    u_prime.add(QVec{Rational(-19)}, Int(1));
    StrataContext ctx(gl1, v, x, QuadForm::identity(1), QVec{Rational(-1)});

    std::cout << "fan Sigma_X: " << ctx.sigma_x.cones.size() << " cones\n";
    for (const auto& c : ctx.sigma_x.cones)
        std::cout << "  dim " << c.cone_dim() << "  " << c.provenance << "\n";

    std::cout << "\nchi-active strata with mu <= 30 (kernel part 0):\n";
    for (const auto& nu : enumerate_chi_active(ctx, QVec{Rational(0)}, Rational(30))) {
        std::cout << "  d' = " << to_string(nu.degree[0]) << "  lambda = " << to_string(nu.lambda[0])
                  << "  mu^2 = " << to_string(nu.mu_sq);
        if (!is_zero(nu.lambda))
            std::cout << "  chi' = " << to_string(shifted_character(ctx, nu.lambda, nu.degree)[0]);
        std::cout << "\n";
    }

    GGWConfig cfg;
    cfg.genus = 0;
    cfg.u_prime = u_prime;
    cfg.trunc = Truncation{.t_order = 4, .s_order = 0};
    QVec d{Rational(-4)};
    GGWResult res = recursive_ggw(ctx, ch2_form(v, 1), cfg, d);
    std::cout << "\nrecursion at degree " << to_string(d[0]) << " (decorated by weight -19):\n";
    auto dump = [](const char* name, const std::map<std::pair<int, int>, Int>& vals) {
        std::cout << "  " << name << ":";
        for (const auto& [ts, v2] : vals)
            std::cout << "  t^" << ts.first << (ts.second ? " s^" + std::to_string(ts.second) : "")
                      << " -> " << v2.str();
        std::cout << "\n";
    };
    dump("I_d      ", res.i_d);
    for (const auto& c : res.corrections) {
        std::cout << "  stratum (d'=" << to_string(c.datum.degree[0])
                  << ", lambda=" << to_string(c.datum.lambda[0]) << ") "
                  << (c.vanishes ? "vanishes by the weight constraint" : "contributes") << "\n";
        if (!c.vanishes) dump("  value ", c.values);
    }
    dump("I_d^chi  ", res.i_d_chi);
    std::cout << "suggested quantization power m* = " << res.suggested_power << "\n";
    return 0;
}
