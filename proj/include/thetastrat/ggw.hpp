#pragma once

// Recursive non-abelian localization: I_d^chi = I_d - sum over chi-active
// strata of the shifted-character Levi indices with the inverse Euler class
// E_lambda, with admissibility pruning and the vanishing-threshold power m*.

#include "thetastrat/twindex.hpp"

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace thetastrat {

// T^{lambda<0} for a concrete lambda: the X-weights and roots (mult -1)
// pairing strictly negatively.
inline WeightedRep negative_tangent_part(const StrataContext& ctx, const QVec& lam) {
    WeightedRep t = WeightedRep::tangent_class(ctx.x_rep, ctx.datum);
    WeightedRep neg;
    for (const auto& e : t.entries)
        if (dot(lam, e.weight) < 0) neg.add(e.weight, e.mult);
    return neg;
}
inline WeightedRep positive_tangent_part(const StrataContext& ctx, const QVec& lam) {
    WeightedRep t = WeightedRep::tangent_class(ctx.x_rep, ctx.datum);
    WeightedRep pos;
    for (const auto& e : t.entries)
        if (dot(lam, e.weight) > 0) pos.add(e.weight, e.mult);
    return pos;
}

// Exact per-stratum vanishing test from the weight constraint: the stratum
// contributes zero to the localization sum when
//   (lambda, d')_V + <lambda, chi> - maxwt_lambda(F)
//     > (lambda, d')_{T^{lambda<0}} - (g-1) <lambda, det T^{lambda<0}>.
inline bool stratum_contribution_vanishes(const StrataContext& ctx, const IndexingDatum& nu,
                                          const std::vector<QVec>& f_weights, int genus) {
    WeightedRep tneg = negative_tangent_part(ctx, nu.lambda);
    Rational lhs = ctx.v_form.inner(nu.lambda, nu.degree) + dot(nu.lambda, ctx.chi);
    Rational maxwt = 0;
    for (const auto& th : f_weights) {
        Rational p = dot(nu.lambda, th);
        if (p > maxwt) maxwt = p;
    }
    QuadForm tform = ch2_form(tneg, ctx.datum.rank);
    QVec det_t(ctx.datum.rank, Rational(0));
    for (const auto& e : tneg.entries) det_t = det_t + Rational(e.mult) * e.weight;
    Rational rhs = tform.inner(nu.lambda, nu.degree) - Rational(genus - 1) * dot(nu.lambda, det_t);
    return lhs - maxwt > rhs;
}

// Smallest power m such that scaling V -> V^{+m}, chi -> m chi makes the
// stratum's contribution vanish; the quantization threshold m* is the max
// over the active strata.
inline long stratum_vanishing_power(const StrataContext& ctx, const IndexingDatum& nu,
                                    const std::vector<QVec>& f_weights, int genus) {
    WeightedRep tneg = negative_tangent_part(ctx, nu.lambda);
    Rational base = ctx.v_form.inner(nu.lambda, nu.degree) + dot(nu.lambda, ctx.chi);
    if (base <= 0) throw precondition_error("vanishing power needs a destabilizing stratum");
    Rational maxwt = 0;
    for (const auto& th : f_weights) {
        Rational p = dot(nu.lambda, th);
        if (p > maxwt) maxwt = p;
    }
    QuadForm tform = ch2_form(tneg, ctx.datum.rank);
    QVec det_t(ctx.datum.rank, Rational(0));
    for (const auto& e : tneg.entries) det_t = det_t + Rational(e.mult) * e.weight;
    Rational rhs = tform.inner(nu.lambda, nu.degree) - Rational(genus - 1) * dot(nu.lambda, det_t);
    // m * base - maxwt > rhs  <=>  m > (rhs + maxwt) / base
    return rat_floor((rhs + maxwt) / base).convert_to<long>() + 1;
}

// Certified upper bound for the admissibility inequality's right-hand side,
// per chamber value of T^{lambda<0}; used both as the stratum scan radius
// (max over chambers) and as the per-datum prune (that datum's chamber).
struct AdmissibilityBounds {
    Rational c_ub;       // upper enclosure of c_{X/V}
    Rational radius_ub;  // max over chambers of the RHS bound on |d'|_V
};

inline Rational admissibility_rhs_ub(const StrataContext& ctx, const WeightedRep& tneg,
                                     const std::vector<QVec>& f_weights, int genus,
                                     const QVec& d_ker, const Rational& c_ub,
                                     const Rational& sqrt_opn_ub) {
    QuadForm tform = ch2_form(tneg, ctx.datum.rank);
    QVec det_t(ctx.datum.rank, Rational(0));
    for (const auto& e : tneg.entries) det_t = det_t + Rational(e.mult) * e.weight;
    QVec phi_t_dker_flat = mat_vec(tform.matrix, d_ker);
    Rational best_sq = 0;
    std::vector<QVec> thetas = f_weights;
    if (thetas.empty()) thetas.push_back(QVec(ctx.datum.rank, Rational(0)));
    for (const auto& th : thetas) {
        QVec arg = th + ctx.chi + Rational(1 - genus) * det_t + phi_t_dker_flat;
        Rational nsq = functional_norm_sq(arg, ctx.b);
        if (nsq > best_sq) best_sq = nsq;
    }
    Rational tol(1, 1000000);
    Rational max_norm_ub = rat_sqrt_bounds(best_sq, tol).ub;
    Rational chi_norm_ub = rat_sqrt_bounds(functional_norm_sq(ctx.chi, ctx.b), tol).ub;
    return sqrt_opn_ub / (1 - c_ub) * (max_norm_ub + chi_norm_ub);
}

inline AdmissibilityBounds admissibility_bounds(const StrataContext& ctx,
                                                const std::vector<QVec>& f_weights, int genus,
                                                const QVec& d_ker) {
    Rational tol(1, 1000000000000LL);
    Interval c_enc = c_XV(ctx.x_rep, ctx.datum, ctx.v_rep, ctx.b, tol);
    if (c_enc.hi >= 1)
        throw precondition_error(
            "positivity condition fails: c_{X/V} >= 1; replace V by V^{+m} (and chi by m chi)");
    Interval opn = operator_norm_enclosure(ctx.phi_v_plus, tol);
    Rational sqrt_opn_ub = rat_sqrt_bounds(opn.hi, Rational(1, 1000000)).ub;
    AdmissibilityBounds out;
    out.c_ub = c_enc.hi;
    out.radius_ub = 0;
    WeightedRep t = WeightedRep::tangent_class(ctx.x_rep, ctx.datum);
    for (const auto& tneg : negative_part_values(t, ctx.datum.rank)) {
        Rational r = admissibility_rhs_ub(ctx, tneg, f_weights, genus, d_ker, c_enc.hi, sqrt_opn_ub);
        if (r > out.radius_ub) out.radius_ub = r;
    }
    return out;
}

// ---------------------------------------------------------------------------

struct LeviContext {
    RootDatum levi;                // sub root datum on the same lattices
    WeightedRep x_fixed;           // X^{lambda=0}
    QVec shifted_chi;              // chi - (lambda, -)_b
    QMat level_shift;              // subtracted from the classical level
    std::vector<DeformTerm> euler_deform;
    std::vector<ChPowerTerm> euler_powers;
    std::vector<ExpFactor> euler_exp;
    Rational q_slice;              // extract the correction at q = q_slice
    Rational t_shift;              // physical t = engine t + t_shift
    int sign = 1;                  // (-1)^{rank shift}
    Rational q_reach;              // q window certifying the slice is complete
};

// The inverse Euler class E_lambda as engine insertions at a fixed stratum
// degree d'. Sym factors expand as Adams/geometric series with q tracking
// the lambda-weight and t the auxiliary scaling weight of each class piece
// (tag convention: q^{+lambda-weight}, t^{-aux-weight}, z^{-central weight}).
// The determinant twist of the negative part splits into a level shift and
// an exponential factor, neither of which carries q/t tags; the correction
// is therefore extracted at the compensating q-slice and t-offset.
// extra_q widens the q-window for the ambient character insertions.
inline LeviContext build_levi_context(const StrataContext& ctx, const IndexingDatum& nu,
                                      int genus, int t_order, const Rational& extra_q,
                                      const QMat& h_cl) {
    LeviContext lc;
    const RootDatum& d = ctx.datum;
    std::vector<QVec> cr, rt;
    for (int i : nu.levi_simple) {
        cr.push_back(d.simple_coroots[i]);
        rt.push_back(d.simple_roots[i]);
    }
    lc.levi = build_root_datum(d.rank, cr, rt);
    for (const auto& e : ctx.x_rep.entries)
        if (dot(nu.lambda, e.weight) == 0) lc.x_fixed.add(e.weight, e.mult);
    lc.shifted_chi = shifted_character(ctx, nu.lambda, nu.degree);
    lc.level_shift = QMat::zero(d.rank, d.rank);
    long rank_shift = 0;

    ZLattice zl = build_z_lattice(lc.levi);
    auto aux_weight = [&](const QVec& gamma) {
        // X-weights scale with the auxiliary G_m; roots do not
        for (const auto& e : ctx.x_rep.entries)
            if (e.weight == gamma) return 1;
        return 0;
    };
    WeightedRep tneg = negative_tangent_part(ctx, nu.lambda);
    WeightedRep tpos = positive_tangent_part(ctx, nu.lambda);

    // determinant-and-rank shift of the negative part
    QVec det_weight_total(d.rank, Rational(0));
    Rational det_aux_total = 0;  // total auxiliary weight of the det twist
    for (const auto& e : tneg.entries) {
        Rational deg = dot(nu.degree, e.weight);
        Rational rank_r = deg + Rational(1 - genus);
        Rational total_rank = Rational(e.mult) * rank_r;
        if (denominator(total_rank) != 1)
            throw integer_gate_error("Euler determinant rank is not integral at this stratum");
        rank_shift += numerator(total_rank).convert_to<long>();
        det_aux_total += Rational(e.mult) * rank_r * aux_weight(e.weight);
        // det(E_sqrtK(gamma)) twists the level by -gamma x gamma per copy
        for (int i = 0; i < d.rank; ++i)
            for (int j = 0; j < d.rank; ++j)
                lc.level_shift(i, j) += Rational(e.mult) * e.weight[i] * e.weight[j];
        det_weight_total = det_weight_total + Rational(e.mult * Int(1 - genus)) * e.weight;
    }
    lc.sign = (rank_shift % 2 == 0) ? 1 : -1;
    if (!is_zero(det_weight_total)) {
        ExpFactor ef;
        ef.weight = det_weight_total;
        auto zc = zl.coords(det_weight_total);
        ef.tag.z.resize(zc.size());
        for (size_t i = 0; i < zc.size(); ++i) ef.tag.z[i] = -zc[i];
        lc.euler_exp.push_back(std::move(ef));
    }

    // extraction offsets: the folded level and the exponential factor carry
    // no q/t tags, so the total-weight-zero slice sits at the compensating
    // q = -<lambda, untagged weights> and t = physical - (-aux_untagged).
    {
        QMat h_shifted = mat_sub(h_cl, lc.level_shift);
        QVec lvl_weight = mat_vec(mat_scale(Rational(-1), h_shifted), nu.degree);  // h_eq(d',-)
        Rational untagged_q = dot(nu.lambda, lvl_weight);
        for (const auto& ef : lc.euler_exp) untagged_q += dot(nu.lambda, ef.weight);
        lc.q_slice = -untagged_q;
        lc.t_shift = -det_aux_total;  // untagged aux sits only in the det twist
    }

    // q window: the character tags are folded by q_slice downstream, so the
    // final slice sits at q = 0; the Sym/power side only steps downward, and
    // the needed depth is the largest folded character pairing plus margin.
    Rational max_w = 0;
    for (const auto& e : tneg.entries)
        if (abs(dot(nu.lambda, e.weight)) > max_w) max_w = abs(dot(nu.lambda, e.weight));
    for (const auto& e : tpos.entries)
        if (abs(dot(nu.lambda, e.weight)) > max_w) max_w = abs(dot(nu.lambda, e.weight));
    lc.q_reach = extra_q + 3 * max_w + 1;

    auto add_sym = [&](const QVec& gamma, const Int& mult, bool dual) {
        // Sym(E_{O_C}(gamma)^(mult)) resp. its dual-side variant
        Rational w = dot(nu.lambda, gamma);
        int aux = aux_weight(gamma);
        QVec gweight = dual ? -gamma : gamma;
        Rational tag_q = dual ? -w : w;
        int tag_t = dual ? aux : -aux;
        long p_cap = 2 * t_order + 6;
        if (w != 0) {
            long cap2 = rat_ceil(lc.q_reach / abs(w) + 2).convert_to<long>();
            if (cap2 > p_cap) p_cap = cap2;
        }
        for (long p = 1; p <= p_cap; ++p) {
            Monomial tag;
            tag.t = static_cast<int>(p) * tag_t;
            tag.q = Rational(p) * tag_q;
            if (abs(tag.q) > lc.q_reach) break;
            if (tag.t > t_order) break;
            auto zc = zl.coords(gweight);
            tag.z.resize(zc.size());
            for (size_t i = 0; i < zc.size(); ++i) tag.z[i] = -Rational(p) * zc[i];
            Rational coeff = Rational((dual ? -1 : 1) * mult.convert_to<long>(), p * p);
            lc.euler_deform.push_back({Rational(p) * gweight, tag, coeff});
        }
        if (genus != 1) {
            Monomial tag;
            tag.t = tag_t;
            tag.q = tag_q;
            auto zc = zl.coords(gweight);
            tag.z.resize(zc.size());
            for (size_t i = 0; i < zc.size(); ++i) tag.z[i] = -zc[i];
            lc.euler_powers.push_back({gweight, tag, (genus - 1) * mult.convert_to<long>()});
        }
    };
    for (const auto& e : tneg.entries) add_sym(e.weight, e.mult, false);
    for (const auto& e : tpos.entries) add_sym(e.weight, e.mult, true);
    return lc;
}

// ---------------------------------------------------------------------------

struct CorrectionTerm {
    IndexingDatum datum;
    bool vanishes = false;                       // pruned by the weight constraint
    std::map<std::pair<int, int>, Int> values;   // (t,s) -> gated integer
};

struct GGWResult {
    bool central_shortcut = false;
    std::map<std::pair<int, int>, Int> i_d;
    std::vector<CorrectionTerm> corrections;
    std::map<std::pair<int, int>, Int> i_d_chi;
    long suggested_power = 1;  // m* over the enumerated strata (criterion 6)
};

struct GGWConfig {
    int genus = 0;
    WeightedRep u;        // exp(s E_sqrtK(U)) insertions
    WeightedRep u_prime;  // E_Op(U') character insertions
    Truncation trunc;
    int depth_limit = 6;
    Real gate_residual = Real("1e-9");
};

namespace detail {

inline std::string memo_key(const StrataContext& ctx, const QVec& d, const GGWConfig& cfg,
                            const QMat& level_cl) {
    std::ostringstream os;
    os << "X:";
    for (const auto& e : ctx.x_rep.entries) {
        for (const auto& q : e.weight) os << to_string(q) << ",";
        os << "*" << e.mult << ";";
    }
    os << "|roots:";
    for (const auto& a : ctx.datum.simple_roots) {
        for (const auto& q : a) os << to_string(q) << ",";
        os << ";";
    }
    os << "|chi:";
    for (const auto& q : ctx.chi) os << to_string(q) << ",";
    os << "|d:";
    for (const auto& q : d) os << to_string(q) << ",";
    os << "|h:";
    for (const auto& q : level_cl.a) os << to_string(q) << ",";
    os << "|g:" << cfg.genus;
    return os.str();
}

}  // namespace detail

class GGWEngine {
  public:
    GGWEngine(StrataContext ctx, QuadForm level_classical, GGWConfig cfg)
        : ctx_(std::move(ctx)), level_cl_(std::move(level_classical)), cfg_(std::move(cfg)) {}

    GGWResult run(const QVec& degree) { return run_impl(ctx_, level_cl_.matrix, degree, {}, 0); }

  private:
    StrataContext ctx_;
    QuadForm level_cl_;
    GGWConfig cfg_;
    std::map<std::string, GGWResult> memo_;

    struct Extras {
        std::vector<DeformTerm> deform;
        std::vector<ChPowerTerm> powers;
        std::vector<ExpFactor> exp_factors;
        Rational q_slice{0};   // extract at q = q_slice
        Rational t_shift{0};   // physical t = engine t + t_shift
        int sign = 1;
        bool active = false;
        std::optional<QVec> grading_lambda;  // tags ambient insertions with q
        Truncation trunc;                    // child truncation (q window widened)
    };

    std::vector<QVec> f_weight_list(const StrataContext& ctx) const {
        std::vector<QVec> w;
        w.push_back(QVec(ctx.datum.rank, Rational(0)));
        for (const auto& e : cfg_.u_prime.entries) w.push_back(e.weight);
        for (const auto& e : cfg_.u.entries)
            for (int k = 1; k <= cfg_.trunc.s_order; ++k) w.push_back(Rational(k) * e.weight);
        return w;
    }

    // index over the whole stack at the given degree, with the composed
    // Euler-class insertions
    std::map<std::pair<int, int>, Cplx> stack_index(const StrataContext& ctx, const QMat& h_cl,
                                                    const QVec& degree, const Extras& extras) {
        LevelData lv = build_level(ctx.datum, QuadForm(h_cl));
        FullIndexConfig fic;
        fic.u = cfg_.u;
        fic.u_prime = cfg_.u_prime;
        fic.x = ctx.x_rep;
        Truncation tr = extras.active ? extras.trunc : cfg_.trunc;
        IndexProblem p = build_full_index_problem(ctx.datum, lv, cfg_.genus, fic, tr);
        // q-tag the ambient character insertions by their lambda-weight when
        // a grading is active, folding the extraction slice into the tags so
        // that the weight-zero slice sits at q = 0 (the tags already carry
        // the z-data)
        if (extras.grading_lambda) {
            for (auto& t : p.op_sum)
                t.tag.q += dot(*extras.grading_lambda, t.weight) - extras.q_slice;
            for (auto& t : p.deform)
                if (t.tag.s > 0) t.tag.q += dot(*extras.grading_lambda, t.weight);
        }
        for (const auto& t : extras.deform) p.deform.push_back(t);
        for (const auto& t : extras.powers) p.op_powers.push_back(t);
        for (const auto& t : extras.exp_factors) p.exp_factors.push_back(t);
        IndexReport rep = tw_engine(p);
        auto bad = z_support_violations(rep, ctx.datum, lv, Real("1e-18"));
        if (!bad.empty()) throw integer_gate_error("z-support violation in the index series");

        ZLattice z = build_z_lattice(ctx.datum);
        std::vector<Rational> want = z.coords(mat_vec(lv.h_eq, degree));
        std::map<std::pair<int, int>, Cplx> out;
        for (const auto& [m, c] : rep.series.terms) {
            std::vector<Rational> mz = m.z;
            mz.resize(want.size(), Rational(0));
            if (mz != want) continue;
            if (m.q != 0) continue;  // q_slice is folded into the tags
            Rational t_phys = Rational(m.t) + extras.t_shift;
            if (denominator(t_phys) != 1) continue;
            long tp = numerator(t_phys).convert_to<long>();
            auto [it, fresh] = out.try_emplace({static_cast<int>(tp), m.s},
                                               extras.sign == 1 ? c : -c);
            if (!fresh) it->second += (extras.sign == 1 ? c : -c);
        }
        return out;
    }

    GGWResult run_impl(const StrataContext& ctx, const QMat& h_cl, const QVec& degree,
                       const Extras& extras, int depth) {
        if (depth > cfg_.depth_limit) throw precondition_error("ggw recursion depth exceeded");
        std::string key = extras.active ? "" : detail::memo_key(ctx, degree, cfg_, h_cl);
        if (!key.empty()) {
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        GGWResult res;

        // central-character shortcut: if (d,-)_V + chi is nonzero on the
        // cocharacters of Z acting trivially on X, the semistable locus is
        // empty and the graded index vanishes identically.
        {
            std::vector<QVec> rows;
            for (const auto& a : ctx.datum.simple_roots) rows.push_back(a);
            for (const auto& e : ctx.x_rep.entries) rows.push_back(e.weight);
            QMat rm(static_cast<int>(rows.size()), ctx.datum.rank);
            for (size_t i = 0; i < rows.size(); ++i)
                for (int j = 0; j < ctx.datum.rank; ++j) rm(static_cast<int>(i), j) = rows[i][j];
            QVec functional = mat_vec(ctx.v_form.matrix, degree) + ctx.chi;
            for (const auto& zx : kernel_basis(rm))
                if (dot(zx, functional) != 0) {
                    res.central_shortcut = true;
                    if (!key.empty()) memo_[key] = res;
                    return res;
                }
        }

        auto raw_i_d = stack_index(ctx, h_cl, degree, extras);
        for (const auto& [ts, c] : raw_i_d)
            res.i_d[ts] = integer_gate(c, cfg_.gate_residual,
                                       "I_d at t^" + std::to_string(ts.first));

        // enumerate candidate strata inside the certified admissibility ball
        auto fw = f_weight_list(ctx);
        QVec d_ker = mat_vec(ctx.proj_ker, degree);
        AdmissibilityBounds bounds = admissibility_bounds(ctx, fw, cfg_.genus, d_ker);
        auto data = enumerate_chi_active_in_ball(ctx, d_ker, bounds.radius_ub,
                                                 mat_vec(ctx.proj_central, degree));

        std::map<std::pair<int, int>, Cplx> correction_sum;
        long mstar = 1;
        for (const auto& nu : data) {
            if (is_zero(nu.lambda)) continue;  // the semistable candidate is not a stratum
            if (extras.active)
                throw precondition_error(
                    "nested strata under an active Euler grading are out of scope (needs "
                    "per-level grading variables)");
            CorrectionTerm term;
            term.datum = nu;
            long power = stratum_vanishing_power(ctx, nu, fw, cfg_.genus);
            if (power > mstar) mstar = power;
            if (stratum_contribution_vanishes(ctx, nu, fw, cfg_.genus)) {
                term.vanishes = true;
                res.corrections.push_back(std::move(term));
                continue;
            }

            // two-pass window computation: the slice offset first, then the
            // folded character pairings that set the q depth
            LeviContext lc0 =
                build_levi_context(ctx, nu, cfg_.genus, cfg_.trunc.t_order, Rational(1), h_cl);
            Rational extra_q = 0;
            for (const auto& w : fw) {
                Rational pq = abs(dot(nu.lambda, w) - lc0.q_slice);
                if (pq > extra_q) extra_q = pq;
            }
            LeviContext lc =
                build_levi_context(ctx, nu, cfg_.genus, cfg_.trunc.t_order, extra_q, h_cl);
            StrataContext levi_ctx(lc.levi, ctx.v_rep, lc.x_fixed, ctx.b, lc.shifted_chi);
            QMat h_shifted = mat_sub(h_cl, lc.level_shift);
            Extras child;
            child.deform = lc.euler_deform;
            child.powers = lc.euler_powers;
            child.exp_factors = lc.euler_exp;
            child.q_slice = lc.q_slice;
            child.t_shift = lc.t_shift;
            child.sign = lc.sign;
            child.active = true;
            child.grading_lambda = nu.lambda;
            child.trunc = cfg_.trunc;
            child.trunc.q_window = lc.q_reach;
            int t_off = rat_ceil(abs(lc.t_shift)).convert_to<int>();
            child.trunc.t_order = cfg_.trunc.t_order + t_off;
            child.trunc.t_floor = -(t_off + cfg_.trunc.t_order + 2);
            // strict decrease: smaller Levi or smaller fixed-weight set
            bool smaller = lc.levi.num_simple() < ctx.datum.num_simple() ||
                           lc.x_fixed.entries.size() < ctx.x_rep.entries.size();
            if (!smaller) throw std::logic_error("ggw recursion failed to shrink");

            GGWResult sub = run_impl(levi_ctx, h_shifted, nu.degree, child, depth + 1);
            if (!sub.central_shortcut) {
                for (const auto& [ts, v] : sub.i_d_chi) {
                    term.values[ts] = v;
                    auto [it, fresh] = correction_sum.try_emplace(ts, Cplx(from_rational(Rational(v))));
                    if (!fresh) it->second += Cplx(from_rational(Rational(v)));
                }
            }
            res.corrections.push_back(std::move(term));
        }
        res.suggested_power = mstar;

        // I_d^chi = I_d - sum corrections, gated
        std::map<std::pair<int, int>, Cplx> chi_val;
        for (const auto& [ts, v] : res.i_d) chi_val[ts] = Cplx(from_rational(Rational(v)));
        for (const auto& [ts, c] : correction_sum) {
            auto [it, fresh] = chi_val.try_emplace(ts, -c);
            if (!fresh) it->second -= c;
        }
        for (const auto& [ts, c] : chi_val) {
            Int gated = integer_gate(c, cfg_.gate_residual, "I_d^chi");
            if (gated != 0 || res.i_d.count(ts)) res.i_d_chi[ts] = gated;
        }
        if (!key.empty()) memo_[key] = res;
        return res;
    }
};

inline GGWResult recursive_ggw(const StrataContext& ctx, const QuadForm& level_classical,
                               const GGWConfig& cfg, const QVec& degree) {
    GGWEngine engine(ctx, level_classical, cfg);
    return engine.run(degree);
}

}  // namespace thetastrat
