// thetastrat: stratification data and K-theoretic index formulas for gauged
// maps from a smooth curve into a linear representation.
//
// Subcommands:
//   strata   chi-active indexing data with shifted characters (JSON/CSV)
//   hn-opt   exact cone optimization from a problem JSON, with certificate
//   index    Teleman-Woodward / deformed generating-function indices
//   ggw      recursive gauged Gromov-Witten invariants I_d, I_d^chi
//   check    built-in oracle suites (verlinde, hg, grid, scan)

#include "thetastrat/ggw.hpp"
#include "thetastrat/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <random>

using namespace thetastrat;
using Clock = std::chrono::steady_clock;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const Json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw config_error("cannot write: " + out_path);
        out << report.dump(2) << "\n";
    }
}

StrataContext make_context(const RunConfig& cfg) {
    return StrataContext(cfg.datum, cfg.v, cfg.x, cfg.b, cfg.chi);
}

// ---------------------------------------------------------------- strata ---

int cmd_strata(const RunConfig& cfg, const std::string& out_path, const std::string& csv_path,
               const std::string& fan_path) {
    auto start = Clock::now();
    StrataContext ctx = make_context(cfg);
    auto data = enumerate_chi_active(ctx, cfg.d_ker, cfg.gamma);
    auto reports = stratum_reports(ctx, data);
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(json_stratum_report(r));
    Json results;
    results["count"] = arr.size();
    results["gamma"] = to_string(cfg.gamma);
    results["coxeter_H"] = ctx.H;
    results["strata"] = arr;
    if (!fan_path.empty()) {
        std::ofstream fan_out(fan_path);
        fan_out << json_fan(ctx.sigma_x).dump(2) << "\n";
    }
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    emit(make_report("strata", cfg.raw, results, ms), out_path);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        csv << "degree,lambda,mu_squared,shifted_chi,center_rank\n";
        for (const auto& r : reports) {
            auto join = [](const QVec& v) {
                std::string s;
                for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + to_string(v[i]);
                return s;
            };
            csv << join(r.datum.degree) << "," << join(r.datum.lambda) << ","
                << to_string(r.datum.mu_sq) << "," << join(r.shifted_chi) << ","
                << r.datum.levi_simple.size() << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------- hn-opt ---

int cmd_hnopt(const std::string& problem_path, const std::string& out_path) {
    auto start = Clock::now();
    Json prob = Json::parse(slurp(problem_path));
    int dim = prob.at("dim").get<int>();
    auto parse_vec = [&](const Json& a) {
        QVec v;
        for (const auto& e : a) v.push_back(parse_rational(e.get<std::string>()));
        return v;
    };
    QMat bm(dim, dim);
    {
        const auto& rows = prob.at("b");
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                bm(i, j) = parse_rational(rows[i][j].get<std::string>());
    }
    QuadForm b(bm);
    Cone cone = [&] {
        std::vector<QVec> span;
        if (prob.contains("span"))
            for (const auto& r : prob["span"]) span.push_back(parse_vec(r));
        else
            for (int i = 0; i < dim; ++i) {
                QVec e(dim, Rational(0));
                e[i] = 1;
                span.push_back(e);
            }
        if (prob.contains("halfspaces")) {
            std::vector<QVec> hs;
            for (const auto& r : prob["halfspaces"]) hs.push_back(parse_vec(r));
            return cone_from_halfspaces(dim, span, hs);
        }
        std::vector<QVec> rays, lines;
        if (prob.contains("rays"))
            for (const auto& r : prob["rays"]) rays.push_back(parse_vec(r));
        if (prob.contains("lineality"))
            for (const auto& r : prob["lineality"]) lines.push_back(parse_vec(r));
        return cone_from_generators(dim, rays, lines);
    }();
    PiecewiseLinearConcave l;
    for (const auto& blk : prob.at("objective")) {
        PLCBlock block;
        block.coeff = parse_rational(blk.at("coeff").get<std::string>());
        for (const auto& f : blk.at("functionals")) block.functionals.push_back(parse_vec(f));
        l.blocks.push_back(std::move(block));
    }
    OptResult r = max_quadratic_on_cone(l, b, cone);
    RatioResult rr = max_ratio_on_cone(l, b, cone);
    Json results;
    results["quadratic"] = json_opt_result(r);
    results["certificate_verified"] = verify_certificate(r, l, b, cone);
    results["ratio_positive"] = rr.positive;
    results["ratio_mu_squared"] = to_string(rr.mu_squared);
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    TomlTable echo;  // hn-opt consumes JSON; echo the path only
    echo.values["problem"] = TomlValue{problem_path};
    emit(make_report("hn-opt", echo, results, ms), out_path);
    return 0;
}

// ----------------------------------------------------------------- index ---

int cmd_index(const RunConfig& cfg, const std::string& out_path) {
    auto start = Clock::now();
    LevelData lv = build_level(cfg.datum, cfg.level, cfg.orientation);
    Truncation tr{.t_order = cfg.trunc_t, .s_order = cfg.trunc_s};
    Json results;
    results["genus"] = cfg.genus;
    results["truncation"] = {{"t", tr.t_order}, {"s", tr.s_order}};
    results["level_h_prime"] = json_qmat(lv.h_prime);
    results["tw_admissible"] = lv.tw_admissible;
    results["theta_sign"] = lv.theta_sign;
    auto sols = enumerate_F_rho(lv, cfg.datum);
    long regular = 0;
    for (const auto& s : sols)
        if (s.regular) ++regular;
    results["solutions"] = {{"count", sols.size()}, {"regular", regular}};
    if (cfg.x.entries.empty() && cfg.u.entries.empty()) {
        IndexReport rep = tw_index(cfg.datum, lv, cfg.genus, cfg.u_prime, {}, tr);
        results["series"] = json_series(rep.series);
        results["regular_orbits"] = rep.regular_orbits;
        Int undeformed = integer_gate(rep.series.constant_term(), Real("1e-9"), "index");
        results["integers"] = {{"undeformed", undeformed.str()}};
    } else {
        FullIndexConfig fic{cfg.u, cfg.u_prime, cfg.x};
        IndexReport rep = full_index_formula(cfg.datum, lv, cfg.genus, fic, tr);
        auto bad = z_support_violations(rep, cfg.datum, lv, Real("1e-12"));
        if (!bad.empty()) throw integer_gate_error("z-support violation in the index series");
        results["series"] = json_series(rep.series);
        results["regular_orbits"] = rep.regular_orbits;
        Json integers;
        auto by_degree = extract_degree_series(rep, cfg.datum, lv, cfg.degree);
        Json dd = Json::array();
        for (const auto& [ts, c] : by_degree) {
            Json e;
            e["t"] = ts.first;
            e["s"] = ts.second;
            e["value"] = integer_gate(c, Real("1e-9"), "I_d").str();
            dd.push_back(e);
        }
        integers["at_degree"] = dd;
        results["integers"] = integers;
    }
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    emit(make_report("index", cfg.raw, results, ms), out_path);
    return 0;
}

// ------------------------------------------------------------------- ggw ---

int cmd_ggw(const RunConfig& cfg, const std::string& out_path) {
    auto start = Clock::now();
    StrataContext ctx = make_context(cfg);
    GGWConfig gcfg;
    gcfg.genus = cfg.genus;
    gcfg.u = cfg.u;
    gcfg.u_prime = cfg.u_prime;
    gcfg.trunc = Truncation{.t_order = cfg.trunc_t, .s_order = cfg.trunc_s};
    GGWResult res = recursive_ggw(ctx, cfg.level, gcfg, cfg.degree);
    Json results;
    results["central_shortcut"] = res.central_shortcut;
    results["I_d"] = json_ggw_values(res.i_d);
    results["I_d_chi"] = json_ggw_values(res.i_d_chi);
    results["suggested_power"] = res.suggested_power;
    Json corr = Json::array();
    for (const auto& c : res.corrections) {
        Json e = json_datum(c.datum);
        e["vanishes"] = c.vanishes;
        e["values"] = json_ggw_values(c.values);
        corr.push_back(e);
    }
    results["corrections"] = corr;
    results["integer_gate_residual"] = "1e-9";
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    emit(make_report("ggw", cfg.raw, results, ms), out_path);
    return 0;
}

// ----------------------------------------------------------------- check ---

int cmd_check(const std::string& suite, unsigned long seed, int threads,
              const std::string& out_path) {
    auto start = Clock::now();
    Json results;
    bool all_ok = true;
    auto note = [&](const std::string& name, bool ok, const std::string& detail) {
        results[name] = {{"pass", ok}, {"detail", detail}};
        std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
        all_ok = all_ok && ok;
    };

    if (suite == "hg" || suite == "all") {
        bool ok = true;
        std::string detail;
        RootDatum gl1 = root_datum_torus(1);
        WeightedRep triv;
        triv.add(QVec{Rational(0)}, Int(1));
        for (long h : {1L, 2L, 3L, 5L})
            for (int g : {0, 1, 2, 3}) {
                QMat m(1, 1);
                m(0, 0) = h;
                Int got = tw_index_integer(gl1, build_level(gl1, QuadForm(m)), g, triv);
                Int want = 1;
                for (int i = 0; i < g; ++i) want *= h;
                if (got != want) {
                    ok = false;
                    detail += "h=" + std::to_string(h) + ",g=" + std::to_string(g) + " ";
                }
            }
        note("abelian_hg", ok, ok ? "h^g law over h in {1,2,3,5}, g in {0..3}" : detail);
    }
    if (suite == "verlinde" || suite == "all") {
        bool ok = true;
        std::string detail = "max residual ";
        Real worst(0);
        RootDatum a1 = root_datum_A1();
        WeightedRep triv;
        triv.add(QVec{Rational(0)}, Int(1));
        for (int k : {1, 2, 3})
            for (int g : {0, 1, 2}) {
                QMat m(1, 1);
                m(0, 0) = 2 * k;
                LevelData lv = build_level(a1, QuadForm(m));
                IndexReport rep =
                    tw_index(a1, lv, g, triv, {}, Truncation{.t_order = 0, .s_order = 0});
                double k2 = k + 2;
                double want = 0.0;
                for (int j = 1; j <= k + 1; ++j)
                    want += std::pow(std::sin(M_PI * j / k2), 2 - 2 * g);
                want *= std::pow(k2 / 2.0, g - 1);
                Real resid = boost::multiprecision::abs(rep.series.constant_term().re - Real(want));
                if (resid > worst) worst = resid;
                if (resid > Real("1e-6")) ok = false;
            }
        note("verlinde_sl2", ok, detail + worst.str(3));
    }
    if (suite == "grid" || suite == "all") {
        std::mt19937 rng(static_cast<unsigned>(seed));
        std::uniform_int_distribution<int> coef(-3, 3);
        std::uniform_int_distribution<int> rank_d(1, 3);
        struct Instance {
            PiecewiseLinearConcave l;
            QuadForm b{QMat()};
            Cone cone;
        };
        std::vector<Instance> instances;
        while (instances.size() < 100) {
            int n = rank_d(rng);
            Instance inst;
            inst.b = QuadForm::identity(n);
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
            inst.cone = cone_from_halfspaces(n, span, hs);
            PLCBlock blk{Rational(1), {}};
            int pieces = 1 + static_cast<int>(rng() % 4);
            for (int p = 0; p < pieces; ++p) {
                QVec f(n);
                for (int j = 0; j < n; ++j) f[j] = coef(rng);
                blk.functionals.push_back(f);
            }
            inst.l.blocks.push_back(blk);
            instances.push_back(std::move(inst));
        }
        std::atomic<int> failures{0};
        auto work = [&](size_t lo, size_t hi) {
            for (size_t i = lo; i < hi; ++i) {
                const auto& inst = instances[i];
                OptResult r = max_quadratic_on_cone(inst.l, inst.b, inst.cone);
                if (!verify_certificate(r, inst.l, inst.b, inst.cone)) {
                    ++failures;
                    continue;
                }
                Rational lsq = 0;
                for (const auto& f : inst.l.blocks[0].functionals) {
                    Rational q = functional_norm_sq(f, inst.b);
                    if (q > lsq) lsq = q;
                }
                // grid domination + closeness, step 2^-8
                Rational tol = Rational(1, 128) * (1 + lsq);
                QVec origin(inst.cone.dim, Rational(0));
                bool dominated = true;
                std::optional<Rational> best;
                auto scan = [&](const QVec& center, int steps, Rational step) {
                    std::vector<int> k(inst.cone.dim, -steps);
                    while (true) {
                        QVec w(inst.cone.dim);
                        for (int j = 0; j < inst.cone.dim; ++j)
                            w[j] = center[j] + Rational(k[j]) * step;
                        if (inst.cone.contains(w)) {
                            Rational v = inst.l.value(w) - inst.b.norm_sq(w) / 2;
                            if (v > r.value) dominated = false;
                            if (!best || v > *best) best = v;
                        }
                        int pos = inst.cone.dim - 1;
                        while (pos >= 0) {
                            ++k[pos];
                            if (k[pos] <= steps) break;
                            k[pos] = -steps;
                            --pos;
                        }
                        if (pos < 0) break;
                    }
                };
                scan(r.maximizer, 8, Rational(1, 256));
                scan(origin, 8, Rational(1, 4));
                for (int j = 0; j < 256; ++j) {
                    QVec w = Rational(j, 256) * r.maximizer;
                    if (!inst.cone.contains(w)) continue;
                    Rational v = inst.l.value(w) - inst.b.norm_sq(w) / 2;
                    if (v > r.value) dominated = false;
                    if (!best || v > *best) best = v;
                }
                bool close = best && (r.value - *best) <= tol;
                if (!dominated || !close) ++failures;
            }
        };
        if (threads > 1) {
            std::vector<std::future<void>> futs;
            size_t chunk = (instances.size() + threads - 1) / threads;
            for (int th = 0; th < threads; ++th) {
                size_t lo = th * chunk, hi = std::min(instances.size(), lo + chunk);
                if (lo < hi) futs.push_back(std::async(std::launch::async, work, lo, hi));
            }
            for (auto& f : futs) f.get();
        } else {
            work(0, instances.size());
        }
        note("kkt_vs_grid", failures == 0,
             std::to_string(instances.size()) + " seeded instances, " +
                 std::to_string(failures.load()) + " failures");
    }
    if (suite == "scan" || suite == "all") {
        bool ok = true;
        for (long chiv : {-1L, -3L, -5L}) {
            RootDatum gl1 = root_datum_torus(1);
            WeightedRep x, v;
            x.add(QVec{Rational(1)}, Int(1));
            v.add(QVec{Rational(1)}, Int(1));
            StrataContext ctx(gl1, v, x, QuadForm::identity(1), QVec{Rational(chiv)});
            auto mine = enumerate_chi_active(ctx, QVec{Rational(0)}, Rational(12));
            auto wide = enumerate_chi_active(ctx, QVec{Rational(0)}, Rational(12), std::nullopt,
                                             Rational(2));
            if (mine.size() != wide.size()) ok = false;
        }
        note("stratum_scan", ok, "GL1 vortex enumeration stable under doubling the ball");
    }
    Json report = make_report("check", TomlTable{}, results,
                              std::chrono::duration<double, std::milli>(Clock::now() - start).count());
    if (!out_path.empty()) emit(report, out_path);
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Theta-stratification data and index formulas for gauged maps"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, csv_path, fan_path, suite = "all";
    int threads = 1;
    long seed = 20240817;
    int trunc_t = -1;
    unsigned precision = 128;

    app.add_option("--threads", threads, "worker threads for parallel suites");
    app.add_option("--seed", seed, "seed for randomized suites");
    app.add_option("--precision", precision, "working precision in bits");

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("--config", config_path, "config file (TOML)");
        if (need_config) opt->required();
        sub->add_option("--out", out_path, "write the JSON report here");
        sub->add_option("--trunc-t", trunc_t, "override the t truncation order");
    };

    auto* strata = app.add_subcommand("strata", "enumerate chi-active indexing data");
    add_common(strata, true);
    strata->add_option("--csv", csv_path, "also write a CSV table");
    strata->add_option("--dump-fan", fan_path, "write the weight fan Sigma_X as JSON");

    auto* hnopt = app.add_subcommand("hn-opt", "exact cone optimization (problem JSON)");
    add_common(hnopt, true);

    auto* index = app.add_subcommand("index", "Teleman-Woodward / generating-function index");
    add_common(index, true);

    auto* ggw = app.add_subcommand("ggw", "recursive gauged Gromov-Witten invariants");
    add_common(ggw, true);

    auto* check = app.add_subcommand("check", "run the oracle suites");
    add_common(check, false);
    check->add_option("suite", suite, "verlinde | hg | grid | scan | all");

    CLI11_PARSE(app, argc, argv);

    try {
        set_precision_bits(precision);
        auto load = [&]() {
            RunConfig cfg = load_run_config(slurp(config_path));
            if (trunc_t >= 0) cfg.trunc_t = trunc_t;
            set_precision_bits(cfg.precision_bits);
            if (precision != 128) set_precision_bits(precision);
            return cfg;
        };
        if (strata->parsed()) return cmd_strata(load(), out_path, csv_path, fan_path);
        if (hnopt->parsed()) return cmd_hnopt(config_path, out_path);
        if (index->parsed()) return cmd_index(load(), out_path);
        if (ggw->parsed()) return cmd_ggw(load(), out_path);
        if (check->parsed()) return cmd_check(suite, static_cast<unsigned long>(seed), threads, out_path);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const precondition_error& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 3;
    } catch (const integer_gate_error& e) {
        std::cerr << "integer gate error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
