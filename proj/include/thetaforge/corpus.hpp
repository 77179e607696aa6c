#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "expand.hpp"

namespace thetaforge {

// Identity records are plain text files, one identity each:
//
//   id: I4
//   scale: 2
//   lhs: f(-q,-q^2)*f(-q^11,-q^22)
//   rhs: f(-q,-q^4)*f(-q^22,-q^33) - q^2*f(-q^2,-q^3)*f(-q^11,-q^44)
//   form: quad: 3,2,4 | lin: 1,4 | const: 0 | delta: 1,0
//   B1: 1,-1;0,3 | shifts: e2, -1..1
//   B2: 1,3;-1,2 | shifts: e1, -2..2
//   match: both
//   notes: ...
//
// `scale` says the statement lives in q while the derivation sum lives in
// q^scale.  `form` + B1/B2 give the extended-quadratic-form derivation;
// `product: a,b | c,d` + B1 give the two-theta-product derivation instead.
// `match` says which sides the expansions reproduce term-for-term up to a
// monomial factor: both | lhs | rhs | none.  When `lhs` is omitted but a
// form is present, the statement's left side is the form's lattice sum.

enum class MatchSides { None, Lhs, Rhs, Both };

struct Derivation {
    std::optional<ExtendedQuadForm> form;
    std::optional<std::array<MonomialArg, 4>> product; // f(a,b) f(c,d)
    std::optional<CosetSystem> cs1, cs2;
    MatchSides match = MatchSides::Both;
};

struct IdentityRecord {
    std::string id;
    i64 scale = 1;
    std::optional<ExprPtr> lhs;
    ExprPtr rhs;
    std::optional<Derivation> derivation;
    std::string notes;

    bool has_derivation() const { return derivation.has_value(); }
};

struct VerifyReport {
    std::string id;
    bool ok = false;
    std::optional<i64> first_bad_exponent;
    i64 elapsed_ms = 0;
    std::string error;
};

struct DerivationReport {
    std::string id;
    bool ok = false;
    std::string failed_stage; // empty when ok
    i64 elapsed_ms = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline CosetSystem parse_coset_line(const std::string& text) {
    // "1,-1;0,3 | shifts: e2, -1..1"  or  "1,1;-1,1 | shifts: (0,0),(1,0)"
    std::size_t bar = text.find('|');
    if (bar == std::string::npos) throw format_error("coset line needs '| shifts:'");
    IntMatrix b = parse_matrix(trim(text.substr(0, bar)));
    std::string rest = trim(text.substr(bar + 1));
    const std::string key = "shifts:";
    if (rest.rfind(key, 0) != 0) throw format_error("expected 'shifts:' in '" + rest + "'");
    rest = trim(rest.substr(key.size()));
    if (!rest.empty() && rest[0] == 'e') {
        // axis form: e<j>, lo..hi
        std::size_t comma = rest.find(',');
        if (comma == std::string::npos) throw format_error("axis shifts need 'e<j>, lo..hi'");
        int j = std::stoi(rest.substr(1, comma - 1));
        std::string range = trim(rest.substr(comma + 1));
        std::size_t dots = range.find("..");
        if (dots == std::string::npos) throw format_error("axis shifts need 'lo..hi'");
        i64 lo = std::stoll(range.substr(0, dots));
        i64 hi = std::stoll(range.substr(dots + 2));
        return CosetSystem::along_axis(std::move(b), j, lo, hi);
    }
    // explicit list: (0,0),(1,0)
    CosetSystem cs;
    cs.B = std::move(b);
    std::size_t pos = 0;
    while ((pos = rest.find('(', pos)) != std::string::npos) {
        std::size_t close = rest.find(')', pos);
        if (close == std::string::npos) throw format_error("unbalanced '(' in shifts");
        cs.reps.push_back(parse_vector(rest.substr(pos + 1, close - pos - 1)));
        pos = close + 1;
    }
    if (cs.reps.empty()) throw format_error("no shift vectors in '" + rest + "'");
    return cs;
}

inline std::array<MonomialArg, 4> parse_product_line(const std::string& text) {
    // "1,q | -q^3,-q^3"
    std::size_t bar = text.find('|');
    if (bar == std::string::npos) throw format_error("product needs 'a,b | c,d'");
    auto parse_pair = [](const std::string& s) {
        std::size_t comma = s.find(',');
        if (comma == std::string::npos) throw format_error("monomial pair needs ','");
        auto mono = [](const std::string& t) {
            ExprPtr e = parse(trim(t));
            if (e->kind == ThetaExpr::Kind::Monomial) {
                if (e->coeff == 1) return MonomialArg{1, e->exp};
                if (e->coeff == -1) return MonomialArg{-1, e->exp};
            }
            throw format_error("expected monomial, got '" + t + "'");
        };
        return std::pair{mono(s.substr(0, comma)), mono(s.substr(comma + 1))};
    };
    auto [a, b] = parse_pair(trim(text.substr(0, bar)));
    auto [c, d] = parse_pair(trim(text.substr(bar + 1)));
    return {a, b, c, d};
}

} // namespace detail

inline IdentityRecord parse_record(const std::string& text) {
    IdentityRecord rec;
    Derivation der;
    bool has_der = false, has_match = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) throw format_error("record line needs 'key: value'");
        std::string key = detail::trim(line.substr(0, colon));
        std::string val = detail::trim(line.substr(colon + 1));
        if (key == "id")
            rec.id = val;
        else if (key == "scale")
            rec.scale = std::stoll(val);
        else if (key == "lhs")
            rec.lhs = parse(val);
        else if (key == "rhs")
            rec.rhs = parse(val);
        else if (key == "form") {
            der.form = parse_form(val);
            has_der = true;
        } else if (key == "product") {
            der.product = detail::parse_product_line(val);
            has_der = true;
        } else if (key == "B1") {
            der.cs1 = detail::parse_coset_line(val);
            has_der = true;
        } else if (key == "B2") {
            der.cs2 = detail::parse_coset_line(val);
            has_der = true;
        } else if (key == "match") {
            has_match = true;
            if (val == "both")
                der.match = MatchSides::Both;
            else if (val == "lhs")
                der.match = MatchSides::Lhs;
            else if (val == "rhs")
                der.match = MatchSides::Rhs;
            else if (val == "none")
                der.match = MatchSides::None;
            else
                throw format_error("match must be both|lhs|rhs|none");
        } else if (key == "notes")
            rec.notes = val;
        else
            throw format_error("unknown record key '" + key + "'");
    }
    if (rec.id.empty()) throw format_error("record needs an id");
    if (!rec.rhs) throw format_error("record '" + rec.id + "' needs an rhs");
    if (has_der) {
        if (!has_match) der.match = der.cs2 ? MatchSides::Both : MatchSides::Lhs;
        rec.derivation = std::move(der);
    }
    if (!rec.lhs && !(rec.derivation && rec.derivation->form))
        throw format_error("record '" + rec.id + "' needs an lhs or a form");
    return rec;
}

inline IdentityRecord load_record(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open record file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_record(buf.str());
    } catch (const error& e) {
        throw format_error(path.filename().string() + ": " + e.what());
    }
}

inline std::vector<IdentityRecord> load_corpus(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".rec") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<IdentityRecord> recs;
    recs.reserve(files.size());
    for (const auto& f : files) recs.push_back(load_record(f));
    return recs;
}

namespace detail {

/// Left side of the statement: the lhs expression, or the form's lattice sum
/// pulled back through q^scale when the lhs is implicit.
inline QSeries eval_statement_lhs(const IdentityRecord& rec, i64 order) {
    if (rec.lhs) return eval(*rec.lhs, order);
    QSeries s = direct_series(rec.derivation->form.value(), order * rec.scale);
    return rec.scale == 1 ? s : s.extract_power(rec.scale);
}

} // namespace detail

/// Statement-level verification: lhs and rhs agree as series below `order`.
inline VerifyReport verify(const IdentityRecord& rec, i64 order) {
    VerifyReport rep;
    rep.id = rec.id;
    if (order < 10) throw error("verification order must be >= 10");
    auto start = std::chrono::steady_clock::now();
    try {
        // Evaluation can return a slightly smaller window (divisions by
        // monomial-led units); widen the request until `order` is covered
        // rather than silently comparing short.
        i64 want = order;
        QSeries lhs = detail::eval_statement_lhs(rec, want);
        QSeries rhs = eval(rec.rhs, want);
        for (int retry = 0; retry < 4 && std::min(lhs.order(), rhs.order()) < order; ++retry) {
            want += order - std::min(lhs.order(), rhs.order());
            lhs = detail::eval_statement_lhs(rec, want);
            rhs = eval(rec.rhs, want);
        }
        if (std::min(lhs.order(), rhs.order()) < order)
            throw precision_error("evaluation window stays below the requested order");
        i64 bad = first_mismatch(lhs.truncated(order), rhs.truncated(order), order);
        rep.ok = bad == order;
        if (!rep.ok) rep.first_bad_exponent = bad;
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.error = std::string(rec.id) + ": " + e.what();
    }
    rep.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return rep;
}

namespace detail {

/// Exact match up to a rational monomial factor: E = (ce/cs) q^h S.
inline bool monomial_ratio_match(const QSeries& e, const QSeries& s) {
    if (e.is_zero() || s.is_zero()) return e.is_zero() && s.is_zero();
    i64 he = e.min_exp(), hs = s.min_exp();
    Int ce = e.coeff(he), cs = s.coeff(hs);
    QSeries left = e.scaled(cs < 0 ? Int(-cs) : cs);
    QSeries right = s.scaled(ce < 0 ? Int(-ce) : ce).shifted(he - hs);
    if ((ce < 0) != (cs < 0)) right = neg(right);
    i64 n = std::min(left.order(), right.order());
    return eq_to_order(left.truncated(n), right.truncated(n), n);
}

} // namespace detail

/// Derivation-level verification.  Stages, in order:
///   ecs:     the stored coset systems are exact covers
///   expand:  each expansion passes the built-in check against the lattice sum
///   agree:   the two expansions agree with each other
///   match:   expansions reproduce the stated sides (up to a monomial factor)
///            after the q^scale substitution, as declared by `match`
inline DerivationReport verify_derivation(const IdentityRecord& rec, i64 order) {
    DerivationReport rep;
    rep.id = rec.id;
    auto start = std::chrono::steady_clock::now();
    auto finish = [&](bool ok, const std::string& stage) {
        rep.ok = ok;
        rep.failed_stage = stage;
        rep.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        return rep;
    };
    if (!rec.derivation) return finish(false, "no derivation data");
    const Derivation& der = *rec.derivation;
    try {
        std::optional<ThetaCombination> e1, e2;
        if (der.product) {
            const auto& p = *der.product;
            if (!der.cs1) return finish(false, "product derivation needs B1");
            // theorem-route expansion; preconditions checked inside
            e1 = expand_product(p[0], p[1], p[2], p[3], der.cs1->B, order);
        } else if (der.form) {
            if (der.cs1) {
                if (!verify_ecs(*der.cs1)) return finish(false, "ecs: B1 system is not exact");
                e1 = expand(*der.form, *der.cs1, order);
            }
            if (der.cs2) {
                if (!verify_ecs(*der.cs2)) return finish(false, "ecs: B2 system is not exact");
                e2 = expand(*der.form, *der.cs2, order);
            }
        } else {
            return finish(false, "derivation has neither form nor product");
        }
        if (e1 && e2 && !eq_to_order(e1->series(order), e2->series(order), order))
            return finish(false, "agree: the two expansions differ");

        bool check_lhs = der.match == MatchSides::Both || der.match == MatchSides::Lhs;
        bool check_rhs = der.match == MatchSides::Both || der.match == MatchSides::Rhs;
        auto side_comb = [&](const ExprPtr& side) {
            return scale_combination(expr_to_combination(*side), rec.scale);
        };
        if (check_lhs) {
            if (!rec.lhs) return finish(false, "match: record has no explicit lhs");
            if (!e1) return finish(false, "match: no expansion for lhs");
            if (!combinations_match(*e1, side_comb(*rec.lhs)))
                return finish(false, "match: B1 expansion does not reproduce the lhs");
        }
        if (check_rhs) {
            ThetaCombination side = side_comb(rec.rhs);
            if (der.product) {
                // the product itself is the right side
                const auto& p = *der.product;
                ThetaCombination prod = expr_to_combination(
                    *mk_binary(ThetaExpr::Kind::Mul, mk_theta(p[0], p[1]), mk_theta(p[2], p[3])));
                if (!combinations_match(prod, side))
                    return finish(false, "match: stated rhs is not the expanded product");
            } else {
                if (!e2) return finish(false, "match: no expansion for rhs");
                if (!combinations_match(*e2, side))
                    return finish(false, "match: B2 expansion does not reproduce the rhs");
            }
        }
    } catch (const std::exception& e) {
        return finish(false, std::string("error: ") + e.what());
    }
    return finish(true, "");
}

/// Run statement verification over a whole corpus; reports come back sorted
/// by id regardless of completion order.
inline std::vector<VerifyReport> verify_all(const std::vector<IdentityRecord>& recs, i64 order) {
    std::vector<std::future<VerifyReport>> futs;
    futs.reserve(recs.size());
    for (const auto& r : recs)
        futs.push_back(std::async(std::launch::async, [&r, order] { return verify(r, order); }));
    std::vector<VerifyReport> out;
    out.reserve(recs.size());
    for (auto& f : futs) out.push_back(f.get());
    std::sort(out.begin(), out.end(),
              [](const VerifyReport& a, const VerifyReport& b) { return a.id < b.id; });
    return out;
}

} // namespace thetaforge
