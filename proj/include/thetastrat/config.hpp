#pragma once

// Run configuration: a small TOML subset (tables, scalars, nested arrays,
// rational strings like "3/2") parsed exactly — rationals never pass through
// floating point — plus the typed RunConfig the commands consume.

#include "thetastrat/quadform.hpp"
#include "thetastrat/rootdata.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace thetastrat {

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
    std::variant<std::string, long, bool, TomlArray> v;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_int() const { return std::holds_alternative<long>(v); }
    bool is_array() const { return std::holds_alternative<TomlArray>(v); }
    const std::string& str() const { return std::get<std::string>(v); }
    long integer() const { return std::get<long>(v); }
    const TomlArray& array() const { return std::get<TomlArray>(v); }

    Rational rational() const {
        if (is_int()) return Rational(integer());
        if (is_string()) return parse_rational(str());
        throw config_error("expected a rational (integer or \"p/q\" string)");
    }
};

class TomlTable {
  public:
    std::map<std::string, TomlValue> values;  // dotted keys: "section.key"

    bool has(const std::string& key) const { return values.count(key) > 0; }

    const TomlValue& at(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw config_error("missing config key: " + key);
        return it->second;
    }

    long get_int(const std::string& key, long fallback) const {
        return has(key) ? at(key).integer() : fallback;
    }
    std::string get_str(const std::string& key, const std::string& fallback) const {
        return has(key) ? at(key).str() : fallback;
    }

    std::string canonical() const {
        std::ostringstream os;
        std::function<void(const TomlValue&)> dump = [&](const TomlValue& val) {
            if (val.is_string()) os << '"' << val.str() << '"';
            else if (val.is_int()) os << val.integer();
            else if (std::holds_alternative<bool>(val.v)) os << (std::get<bool>(val.v) ? "true" : "false");
            else {
                os << '[';
                for (const auto& e : val.array()) {
                    dump(e);
                    os << ',';
                }
                os << ']';
            }
        };
        for (const auto& [k, val] : values) {
            os << k << '=';
            dump(val);
            os << '\n';
        }
        return os.str();
    }
};

namespace detail {

inline void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline TomlValue parse_toml_value(const std::string& s, size_t& i);

inline TomlValue parse_toml_scalar(const std::string& s, size_t& i) {
    skip_ws(s, i);
    if (i >= s.size()) throw config_error("unexpected end of config value");
    if (s[i] == '"') {
        size_t end = s.find('"', i + 1);
        if (end == std::string::npos) throw config_error("unterminated string in config");
        std::string str = s.substr(i + 1, end - i - 1);
        i = end + 1;
        return TomlValue{str};
    }
    if (s.compare(i, 4, "true") == 0) {
        i += 4;
        return TomlValue{true};
    }
    if (s.compare(i, 5, "false") == 0) {
        i += 5;
        return TomlValue{false};
    }
    size_t start = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '-' || s[i] == '+'))
        ++i;
    if (i == start) throw config_error("cannot parse config value near: " + s.substr(start, 12));
    if (i < s.size() && (s[i] == '.' || s[i] == 'e' || s[i] == 'E' || s[i] == '/'))
        throw config_error(
            "floating point / fractional literals are not accepted; quote rationals as \"p/q\"");
    return TomlValue{std::stol(s.substr(start, i - start))};
}

inline TomlValue parse_toml_value(const std::string& s, size_t& i) {
    skip_ws(s, i);
    if (i < s.size() && s[i] == '[') {
        ++i;
        TomlArray arr;
        skip_ws(s, i);
        if (i < s.size() && s[i] == ']') {
            ++i;
            return TomlValue{arr};
        }
        while (true) {
            arr.push_back(parse_toml_value(s, i));
            skip_ws(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                skip_ws(s, i);
                if (i < s.size() && s[i] == ']') { ++i; break; }  // trailing comma
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                break;
            }
            throw config_error("malformed array in config");
        }
        return TomlValue{arr};
    }
    return parse_toml_scalar(s, i);
}

}  // namespace detail

// Parses the supported TOML subset: [tables], key = value with string,
// integer, boolean, and (nested) array values. Multiline arrays are joined
// before parsing; comments start with '#'.
inline TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string line, section, pending;
    auto strip_comment = [](std::string l) {
        bool in_str = false;
        for (size_t k = 0; k < l.size(); ++k) {
            if (l[k] == '"') in_str = !in_str;
            if (l[k] == '#' && !in_str) return l.substr(0, k);
        }
        return l;
    };
    auto process = [&](const std::string& full) {
        size_t eq = full.find('=');
        if (eq == std::string::npos) throw config_error("expected key = value: " + full);
        std::string key = full.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key.empty()) throw config_error("empty key in config");
        std::string val = full.substr(eq + 1);
        size_t i = 0;
        TomlValue v = detail::parse_toml_value(val, i);
        detail::skip_ws(val, i);
        if (i < val.size()) throw config_error("trailing characters after value: " + val.substr(i));
        std::string fullkey = section.empty() ? key : section + "." + key;
        if (table.values.count(fullkey)) throw config_error("duplicate config key: " + fullkey);
        table.values[fullkey] = std::move(v);
    };
    while (std::getline(in, line)) {
        line = strip_comment(line);
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
        if (!pending.empty()) {
            pending += " " + trimmed;
            long depth = 0;
            for (char c : pending)
                depth += (c == '[') - (c == ']');
            if (depth == 0) {
                process(pending);
                pending.clear();
            }
            continue;
        }
        if (trimmed.empty()) continue;
        if (trimmed.front() == '[' && trimmed.back() == ']' && trimmed.find('=') == std::string::npos) {
            section = trimmed.substr(1, trimmed.size() - 2);
            continue;
        }
        long depth = 0;
        for (char c : trimmed)
            depth += (c == '[') - (c == ']');
        if (depth > 0) {
            pending = trimmed;
            continue;
        }
        process(trimmed);
    }
    if (!pending.empty()) throw config_error("unterminated multiline array in config");
    return table;
}

// ---------------------------------------------------------------------------

struct RunConfig {
    TomlTable raw;
    RootDatum datum;
    WeightedRep v, x, u, u_prime;
    QuadForm b{QMat()};
    QVec chi;
    QuadForm level{QMat()};
    int orientation = -1;
    QVec degree;
    QVec d_ker;
    Rational gamma{0};
    int genus = 0;
    int trunc_t = 8, trunc_s = 2;
    unsigned precision_bits = 128;
    unsigned long seed = 20240817;
    int threads = 1;
};

namespace detail {

inline QVec parse_qvec(const TomlValue& val) {
    QVec out;
    for (const auto& e : val.array()) out.push_back(e.rational());
    return out;
}

inline WeightedRep parse_rep(const TomlTable& t, const std::string& key) {
    WeightedRep rep;
    if (!t.has(key)) return rep;
    for (const auto& entry : t.at(key).array()) {
        const auto& pair = entry.array();
        if (pair.size() != 2) throw config_error(key + " entries must be [[weights...], mult]");
        rep.add(parse_qvec(pair[0]), Int(pair[1].integer()));
    }
    return rep;
}

inline QMat parse_qmat(const TomlValue& val) {
    const auto& rows = val.array();
    int n = static_cast<int>(rows.size());
    QMat m(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = rows[i].array();
        if (static_cast<int>(row.size()) != n) throw config_error("matrix rows must be square");
        for (int j = 0; j < n; ++j) m(i, j) = row[j].rational();
    }
    return m;
}

}  // namespace detail

inline RunConfig load_run_config(const std::string& text) {
    RunConfig cfg;
    cfg.raw = parse_toml(text);
    const TomlTable& t = cfg.raw;

    long weyl_cap = t.get_int("root_datum.weyl_cap", kDefaultWeylCap);
    if (t.has("root_datum.type")) {
        cfg.datum = root_datum_preset(t.at("root_datum.type").str(), weyl_cap);
    } else if (t.has("root_datum.coroots")) {
        auto parse_rows = [&](const std::string& key) {
            std::vector<QVec> out;
            for (const auto& row : t.at(key).array()) out.push_back(detail::parse_qvec(row));
            return out;
        };
        auto coroots = parse_rows("root_datum.coroots");
        auto roots = parse_rows("root_datum.roots");
        int rank = coroots.empty() ? static_cast<int>(t.get_int("root_datum.rank", 0))
                                   : static_cast<int>(coroots[0].size());
        cfg.datum = build_root_datum(rank, coroots, roots, weyl_cap);
    } else {
        throw config_error("config needs root_datum.type or explicit root_datum.coroots/roots");
    }
    const int n = cfg.datum.rank;

    cfg.v = detail::parse_rep(t, "reps.V");
    cfg.x = detail::parse_rep(t, "reps.X");
    cfg.u = detail::parse_rep(t, "reps.U");
    cfg.u_prime = detail::parse_rep(t, "reps.U_prime");

    std::string btag = t.get_str("norm.b", "identity");
    if (btag == "identity") {
        cfg.b = QuadForm::identity(n);
    } else if (btag == "killing-normalized" || btag == "ch2-adjoint-plus-center") {
        // ch2 of the adjoint plus the identity on the center: the default the
        // config falls back to when no norm is specified
        QMat m = tr_adjoint_form(cfg.datum).matrix;
        if (!cfg.datum.central_basis.empty()) {
            QMat pc = b_orthogonal_projection(cfg.datum.central_basis, QuadForm::identity(n));
            m = mat_add(m, pc);
        }
        cfg.b = QuadForm(m);
    } else if (btag == "explicit") {
        cfg.b = QuadForm(detail::parse_qmat(t.at("norm.rows")));
    } else {
        throw config_error("unknown norm.b tag: " + btag);
    }
    if (!cfg.b.is_positive_definite()) throw config_error("norm b must be positive definite");

    cfg.chi = t.has("stability.chi") ? detail::parse_qvec(t.at("stability.chi")) : QVec(n, Rational(0));
    if (static_cast<int>(cfg.chi.size()) != n) throw config_error("chi has the wrong dimension");
    cfg.degree = t.has("stability.degree") ? detail::parse_qvec(t.at("stability.degree"))
                                           : QVec(n, Rational(0));
    cfg.d_ker = t.has("stability.d_ker") ? detail::parse_qvec(t.at("stability.d_ker"))
                                         : QVec(n, Rational(0));
    cfg.gamma = t.has("stability.gamma") ? t.at("stability.gamma").rational() : Rational(10);

    std::string ltag = t.get_str("level.matrix", "ch2V");
    if (ltag == "ch2V") {
        cfg.level = ch2_form(cfg.v, n);
    } else if (ltag == "explicit") {
        cfg.level = QuadForm(detail::parse_qmat(t.at("level.rows")));
    } else {
        throw config_error("unknown level.matrix tag: " + ltag);
    }
    cfg.orientation = static_cast<int>(t.get_int("level.orientation", -1));

    cfg.genus = static_cast<int>(t.get_int("index.genus", 0));
    if (cfg.genus < 0) throw config_error("genus must be >= 0");
    cfg.trunc_t = static_cast<int>(t.get_int("index.trunc_t", 8));
    cfg.trunc_s = static_cast<int>(t.get_int("index.trunc_s", 2));
    cfg.precision_bits = static_cast<unsigned>(t.get_int("precision_bits", 128));
    cfg.seed = static_cast<unsigned long>(t.get_int("seed", 20240817));
    cfg.threads = static_cast<int>(t.get_int("threads", 1));

    // cross-reference validation: chi must be exactly W-invariant
    for (const auto& g : cfg.datum.weyl_generators) {
        QMat gm = cfg.datum.weyl_on_M(g);
        if (!(mat_vec(gm, cfg.chi) == cfg.chi))
            throw config_error("stability.chi is not Weyl-invariant");
    }
    return cfg;
}

// FNV-1a over the canonical dump; the round-trip invariant compares these.
inline std::string config_hash(const TomlTable& t) {
    std::string c = t.canonical();
    unsigned long long h = 1469598103934665603ULL;
    for (unsigned char ch : c) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace thetastrat
