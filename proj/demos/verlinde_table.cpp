// Prints a small table of SL2 Verlinde-type indices chi(Bun, L^k) computed
// through the fixed-point sum, next to the classical sine formula.

#include "thetastrat/twindex.hpp"

#include <cmath>
#include <cstdio>

using namespace thetastrat;

int main() {
    set_precision_bits(128);
    RootDatum a1 = root_datum_A1();
    WeightedRep triv;
    triv.add(QVec{Rational(0)}, Int(1));
    std::printf("%4s %4s %12s %14s\n", "k", "g", "index", "sine formula");
    for (int k = 1; k <= 5; ++k) {
        QMat m(1, 1);
        m(0, 0) = 2 * k;
        LevelData lv = build_level(a1, QuadForm(m));
        for (int g = 0; g <= 3; ++g) {
            Int idx = tw_index_integer(a1, lv, g, triv);
            double k2 = k + 2, sum = 0;
            for (int j = 1; j <= k + 1; ++j) sum += std::pow(std::sin(M_PI * j / k2), 2 - 2 * g);
            double classical = std::pow(k2 / 2.0, g - 1) * sum;
            std::printf("%4d %4d %12s %14.4f\n", k, g, idx.str().c_str(), classical);
        }
    }
    return 0;
}
