#pragma once

// Exact convex optimization on polyhedral cones: the unique maximizer of
// l(w) - |w|_b^2/2 for piecewise-linear-concave l, with a re-verifiable KKT
// certificate, plus the normalized-invariant (ratio) variant.

#include "thetastrat/fans.hpp"

#include <optional>
#include <vector>

namespace thetastrat {

// l(w) = sum_k coeff_k * min{ <w, f> : f in block k }, coeff_k >= 0.
// A single-functional block is the plain linear part.
struct PLCBlock {
    Rational coeff;
    std::vector<QVec> functionals;
};

struct PiecewiseLinearConcave {
    std::vector<PLCBlock> blocks;

    static PiecewiseLinearConcave linear(const QVec& f) {
        return PiecewiseLinearConcave{{PLCBlock{Rational(1), {f}}}};
    }

    Rational value(const QVec& w) const {
        Rational total = 0;
        for (const auto& blk : blocks) {
            if (blk.functionals.empty()) continue;
            Rational m = dot(w, blk.functionals[0]);
            for (size_t i = 1; i < blk.functionals.size(); ++i) {
                Rational v = dot(w, blk.functionals[i]);
                if (v < m) m = v;
            }
            total += blk.coeff * m;
        }
        return total;
    }

    // the linear functional of the cell selected by `choice`
    QVec cell_functional(const std::vector<int>& choice, int dim) const {
        QVec l(dim, Rational(0));
        for (size_t k = 0; k < blocks.size(); ++k)
            if (!blocks[k].functionals.empty())
                l = l + blocks[k].coeff * blocks[k].functionals[choice[k]];
        return l;
    }

    // halfspaces confining w to the cell: chosen functional is the block min
    std::vector<QVec> cell_constraints(const std::vector<int>& choice) const {
        std::vector<QVec> cs;
        for (size_t k = 0; k < blocks.size(); ++k)
            for (size_t j = 0; j < blocks[k].functionals.size(); ++j)
                if (static_cast<int>(j) != choice[k])
                    cs.push_back(blocks[k].functionals[j] - blocks[k].functionals[choice[k]]);
        return cs;
    }

    long cell_count() const {
        long n = 1;
        for (const auto& blk : blocks)
            if (!blk.functionals.empty()) n *= static_cast<long>(blk.functionals.size());
        return n;
    }
};

// KKT certificate for one cell: w = b^{-1}(l - sum_j c_j a_j) in the span
// subspace, active rows a_j with multipliers c_j >= 0.
struct KKTCertificate {
    std::vector<int> cell_choice;
    QVec cell_functional_ambient;
    std::vector<QVec> constraint_rows;  // ambient functionals, all must be >= 0 at w
    std::vector<int> active;
    std::vector<Rational> multipliers;
};

struct OptResult {
    QVec maximizer;
    Rational value;          // l(w*) - |w*|^2_b / 2
    Rational mu_squared;     // |w*|^2_b = l(w*) at the optimum (ratio variant)
    bool boundary = false;   // a cone facet is active at w*
    KKTCertificate certificate;
};

namespace detail {

struct CellProblem {
    std::vector<QVec> subspace;         // basis of {span equations hold}
    QMat b_red;                         // subspace Gram of b
    QMat b_red_inv;
    std::vector<QVec> rows;             // inequality rows in subspace coords
    std::vector<QVec> rows_ambient;     // matching ambient functionals
    QVec l_red;                         // objective functional in subspace coords
};

// maximize <y, l> - y^T B y / 2 s.t. rows . y >= 0, by independent-subset
// active-set search; the strictly concave objective makes the first KKT point
// the unique global optimum.
inline std::optional<std::pair<QVec, std::vector<std::pair<int, Rational>>>> solve_cell(
    const CellProblem& cp) {
    const int m = static_cast<int>(cp.rows.size());
    const int s = static_cast<int>(cp.subspace.size());
    if (s == 0) return std::make_pair(QVec{}, std::vector<std::pair<int, Rational>>{});
    auto binv_apply = [&](const QVec& v) { return mat_vec(cp.b_red_inv, v); };
    QVec y0 = binv_apply(cp.l_red);

    std::optional<std::pair<QVec, std::vector<std::pair<int, Rational>>>> found;

    auto attempt = [&](const std::vector<int>& act) -> bool {
        const int k = static_cast<int>(act.size());
        QVec y;
        std::vector<Rational> mult(k, Rational(0));
        if (k == 0) {
            y = y0;
        } else {
            QMat gram(k, k);
            QVec rhs(k);
            std::vector<QVec> binv_rows(k);
            for (int i = 0; i < k; ++i) binv_rows[i] = binv_apply(cp.rows[act[i]]);
            for (int i = 0; i < k; ++i) {
                rhs[i] = -dot(cp.rows[act[i]], y0);
                for (int j = 0; j < k; ++j) gram(i, j) = dot(cp.rows[act[i]], binv_rows[j]);
            }
            if (rank(gram) < k) return false;
            auto c = solve(gram, rhs);
            if (!c) return false;
            for (int i = 0; i < k; ++i) {
                if ((*c)[i] < 0) return false;
                mult[i] = (*c)[i];
            }
            y = y0;
            for (int i = 0; i < k; ++i) y = y + mult[i] * binv_rows[i];
        }
        for (int j = 0; j < m; ++j)
            if (dot(cp.rows[j], y) < 0) return false;
        std::vector<std::pair<int, Rational>> cert;
        for (int i = 0; i < k; ++i) cert.push_back({act[i], mult[i]});
        found = std::make_pair(std::move(y), std::move(cert));
        return true;
    };

    // enumerate subsets in increasing size; independence is checked by the
    // Gram-rank test inside attempt()
    std::vector<int> act;
    std::function<bool(int, int)> rec = [&](int start, int remaining) -> bool {
        if (remaining == 0) return attempt(act);
        for (int i = start; i < m; ++i) {
            act.push_back(i);
            if (rec(i + 1, remaining - 1)) return true;
            act.pop_back();
        }
        return false;
    };
    for (int size = 0; size <= std::min(m, s); ++size)
        if (rec(0, size)) break;
    return found;
}

}  // namespace detail

// The unique global maximizer of l(w) - |w|_b^2/2 on the cone.
inline OptResult max_quadratic_on_cone(const PiecewiseLinearConcave& l, const QuadForm& b,
                                       const Cone& cone) {
    const int n = cone.dim;
    if (!cone.span.empty()) {
        QMat sm = from_columns(cone.span, n);
        QMat gram = mat_mul(transpose(sm), mat_mul(b.matrix, sm));
        if (classify_form(gram) != Definiteness::positive)
            throw precondition_error("b must be positive definite on span(cone)");
    }
    std::optional<OptResult> best;
    std::vector<int> choice(l.blocks.size(), 0);
    const long cells = l.cell_count();
    for (long cell = 0; cell < cells; ++cell) {
        long cc = cell;
        for (size_t k = 0; k < l.blocks.size(); ++k) {
            long sz = l.blocks[k].functionals.empty() ? 1 : static_cast<long>(l.blocks[k].functionals.size());
            choice[k] = static_cast<int>(cc % sz);
            cc /= sz;
        }
        QVec lf = l.cell_functional(choice, n);
        std::vector<QVec> ineqs = cone.facets;
        for (auto& r : l.cell_constraints(choice)) ineqs.push_back(std::move(r));

        detail::CellProblem cp;
        cp.subspace = cone.span;
        const int s = static_cast<int>(cp.subspace.size());
        if (s == 0) {
            // the cone is the origin
            OptResult r;
            r.maximizer = QVec(n, Rational(0));
            r.value = 0;
            r.mu_squared = 0;
            r.boundary = true;
            r.certificate.cell_choice = choice;
            r.certificate.cell_functional_ambient = lf;
            if (!best || r.value > best->value) best = r;
            continue;
        }
        QMat sm = from_columns(cp.subspace, n);
        cp.b_red = mat_mul(transpose(sm), mat_mul(b.matrix, sm));
        cp.b_red_inv = *inverse(cp.b_red);
        cp.l_red = QVec(s);
        for (int k = 0; k < s; ++k) cp.l_red[k] = dot(lf, cp.subspace[k]);
        for (const auto& g : ineqs) {
            QVec row(s);
            bool zero = true;
            for (int k = 0; k < s; ++k) {
                row[k] = dot(g, cp.subspace[k]);
                if (row[k] != 0) zero = false;
            }
            if (zero) continue;
            cp.rows.push_back(std::move(row));
            cp.rows_ambient.push_back(g);
        }
        auto sol = detail::solve_cell(cp);
        if (!sol) continue;  // no KKT point: cell optimum is attained elsewhere
        QVec w(n, Rational(0));
        for (int k = 0; k < s; ++k) w = w + sol->first[k] * cp.subspace[k];
        OptResult r;
        r.maximizer = w;
        r.value = l.value(w) - b.norm_sq(w) / 2;
        r.mu_squared = b.norm_sq(w);
        r.certificate.cell_choice = choice;
        r.certificate.cell_functional_ambient = lf;
        r.certificate.constraint_rows = cp.rows_ambient;
        for (auto& [idx, c] : sol->second) {
            r.certificate.active.push_back(idx);
            r.certificate.multipliers.push_back(c);
        }
        r.boundary = false;
        for (const auto& f : cone.facets)
            if (dot(f, w) == 0) r.boundary = true;
        if (cone.span_equations.empty() && cone.facets.empty()) r.boundary = false;
        if (!best || r.value > best->value) best = r;
    }
    if (!best) throw std::logic_error("no cell produced an optimum");
    return *best;
}

// Re-derive the certificate algebra; returns false on any exact violation.
inline bool verify_certificate(const OptResult& r, const PiecewiseLinearConcave& l,
                               const QuadForm& b, const Cone& cone) {
    const auto& cert = r.certificate;
    const QVec& w = r.maximizer;
    if (!cone.contains(w)) return false;
    // multipliers >= 0
    for (const auto& c : cert.multipliers)
        if (c < 0) return false;
    // stationarity: b w = l + sum c_j a_j on the span (rows are >=-oriented)
    QVec resid = mat_vec(b.matrix, w);
    resid = resid - cert.cell_functional_ambient;
    for (size_t i = 0; i < cert.active.size(); ++i)
        resid = resid - cert.multipliers[i] * cert.constraint_rows[cert.active[i]];
    for (const auto& sv : cone.span)
        if (dot(resid, sv) != 0) return false;
    // feasibility and complementary slackness
    for (size_t j = 0; j < cert.constraint_rows.size(); ++j)
        if (dot(cert.constraint_rows[j], w) < 0) return false;
    for (size_t i = 0; i < cert.active.size(); ++i)
        if (cert.multipliers[i] != 0 && dot(cert.constraint_rows[cert.active[i]], w) != 0)
            return false;
    // the reported value matches the true piecewise objective
    if (r.value != l.value(w) - b.norm_sq(w) / 2) return false;
    return true;
}

struct RatioResult {
    bool positive = false;       // l > 0 somewhere on the cone
    OptResult opt;               // quadratic result; maximizer direction when positive
    Rational mu_squared;         // max of l(w)^2/|w|^2_b, exact
    // when !positive: generators of the linearity cells, all with l <= 0
    std::vector<QVec> nonpositivity_witnesses;
};

// Maximize l(w)/|w|_b; per the Lagrange analysis the maximizer is the
// normalized quadratic optimum, and mu^2 = l(w*) = |w*|_b^2 exactly.
inline RatioResult max_ratio_on_cone(const PiecewiseLinearConcave& l, const QuadForm& b,
                                     const Cone& cone) {
    RatioResult res;
    res.opt = max_quadratic_on_cone(l, b, cone);
    if (res.opt.value > 0) {
        res.positive = true;
        res.mu_squared = b.norm_sq(res.opt.maximizer);
        // complementarity identity: l(w*) = |w*|^2
        if (l.value(res.opt.maximizer) != res.mu_squared)
            throw std::logic_error("ratio optimum lost the complementarity identity");
        return res;
    }
    res.positive = false;
    res.mu_squared = 0;
    // certificate: l <= 0 on every generator of every linearity cell
    std::vector<int> choice(l.blocks.size(), 0);
    const long cells = l.cell_count();
    for (long cell = 0; cell < cells; ++cell) {
        long cc = cell;
        for (size_t k = 0; k < l.blocks.size(); ++k) {
            long sz = l.blocks[k].functionals.empty() ? 1 : static_cast<long>(l.blocks[k].functionals.size());
            choice[k] = static_cast<int>(cc % sz);
            cc /= sz;
        }
        std::vector<QVec> constraints = cone.facets;
        for (auto& r : l.cell_constraints(choice)) constraints.push_back(std::move(r));
        Cone cellcone = cone_from_halfspaces(cone.dim, cone.span, constraints);
        for (const auto& g : cellcone.positive_generators()) {
            if (l.value(g) > 0) throw std::logic_error("nonpositive flag contradicted on a generator");
            res.nonpositivity_witnesses.push_back(g);
        }
    }
    return res;
}

struct FanOptResult {
    int cone_id = -1;
    RatioResult ratio;
};

// Best normalized invariant over a union of cones with per-cone objectives;
// deterministic tie-break toward the smallest cone id.
inline FanOptResult hn_over_fan(const std::vector<std::pair<Cone, PiecewiseLinearConcave>>& cones,
                                const QuadForm& b) {
    if (cones.empty()) throw precondition_error("hn_over_fan: empty cone list");
    FanOptResult best;
    for (size_t i = 0; i < cones.size(); ++i) {
        RatioResult r = max_ratio_on_cone(cones[i].second, b, cones[i].first);
        bool better = false;
        if (best.cone_id < 0)
            better = true;
        else if (r.positive && !best.ratio.positive)
            better = true;
        else if (r.positive == best.ratio.positive && r.mu_squared > best.ratio.mu_squared)
            better = true;
        if (better) {
            best.cone_id = static_cast<int>(i);
            best.ratio = std::move(r);
        }
    }
    return best;
}

struct MovementCheck {
    Rational ratio_sq;   // |w*_delta - w*_gamma|^2_b / |delta-gamma|_1^2
    Rational bound_sq;   // c^2 = max functional norm squared
    QVec w_delta, w_gamma;
};

// Lipschitz movement of the unconstrained maximizer along a delta segment:
// blocks = (linear part, mrk min-set, gen min-set); coefficients
// (1, delta_mrk, delta_gen).
inline MovementCheck movement_bound_check(const QVec& linear_part,
                                          const std::vector<QVec>& mrk_set,
                                          const std::vector<QVec>& gen_set,
                                          const std::pair<Rational, Rational>& delta,
                                          const std::pair<Rational, Rational>& gamma,
                                          const QuadForm& b, const Cone& span_cone) {
    if (delta.first < 0 || delta.second < 0 || gamma.first < 0 || gamma.second < 0)
        throw precondition_error("delta parameters must be nonnegative");
    auto build = [&](const std::pair<Rational, Rational>& dl) {
        PiecewiseLinearConcave l;
        l.blocks.push_back({Rational(1), {linear_part}});
        if (!mrk_set.empty()) l.blocks.push_back({dl.first, mrk_set});
        if (!gen_set.empty()) l.blocks.push_back({dl.second, gen_set});
        return l;
    };
    OptResult rd = max_quadratic_on_cone(build(delta), b, span_cone);
    OptResult rg = max_quadratic_on_cone(build(gamma), b, span_cone);
    MovementCheck mc;
    mc.w_delta = rd.maximizer;
    mc.w_gamma = rg.maximizer;
    QVec diff = rd.maximizer - rg.maximizer;
    Rational l1 = abs(delta.first - gamma.first) + abs(delta.second - gamma.second);
    Rational num = b.norm_sq(diff);
    mc.ratio_sq = l1 == 0 ? Rational(0) : num / (l1 * l1);
    mc.bound_sq = 0;
    for (const auto& f : mrk_set) {
        Rational ns = functional_norm_sq(f, b);
        if (ns > mc.bound_sq) mc.bound_sq = ns;
    }
    for (const auto& f : gen_set) {
        Rational ns = functional_norm_sq(f, b);
        if (ns > mc.bound_sq) mc.bound_sq = ns;
    }
    if (l1 != 0 && mc.ratio_sq > mc.bound_sq)
        throw std::logic_error("movement bound violated: maximizer moved faster than the certified Lipschitz constant");
    return mc;
}

}  // namespace thetastrat
