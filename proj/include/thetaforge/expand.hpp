#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "expr.hpp"
#include "matrix.hpp"
#include "quadform.hpp"
#include "theta.hpp"

namespace thetaforge {

/// One summand of a theta-product combination:
///
///     coeff * q^shift * prod_k f(a_k, b_k),
///
/// with every factor in the canonical range of normalize_theta.  A factor
/// f(-1, x) makes the whole term identically zero; that is recorded in
/// `vanishing` rather than dropped, because which cosets vanish is part of
/// the structure being verified.
struct ThetaTerm {
    Int coeff = 1;
    i64 shift = 0;
    std::vector<std::pair<MonomialArg, MonomialArg>> factors;
    bool vanishing = false;

    QSeries series(i64 order) const {
        if (vanishing || coeff == 0 || shift >= order) return QSeries::zero(order);
        QSeries r = QSeries::one(order - shift);
        for (const auto& [a, b] : factors) r = mul(r, theta_series(a, b, order - shift));
        return r.scaled(coeff).shifted(shift).truncated(order);
    }
};

struct ThetaCombination {
    std::vector<ThetaTerm> terms;

    QSeries series(i64 order) const {
        QSeries r(order);
        for (const auto& t : terms) r = add(r, t.series(order));
        return r;
    }

    bool all_vanishing() const {
        for (const auto& t : terms)
            if (!t.vanishing) return false;
        return true;
    }

    i64 max_arg_exponent() const {
        i64 m = 0;
        for (const auto& t : terms)
            for (const auto& [a, b] : t.factors) m = std::max({m, a.exp, b.exp});
        return m;
    }
};

namespace detail {

/// Print one factor with the classical shorthands: f(m,m) = phi(m),
/// f(m,m^3) = psi(m), f(-q^k,-q^2k) = f(-q^k), f(1,m) = 2 psi(m).
/// Returns the extra integer factor pulled out (1 or 2).
inline int factor_to_string(const MonomialArg& a, const MonomialArg& b, std::string& out) {
    if (a.is_one()) {
        out = "psi(" + b.to_string() + ")";
        return 2;
    }
    if (a == b) {
        out = "phi(" + a.to_string() + ")";
        return 1;
    }
    if (b.sign == a.sign && b.exp == 3 * a.exp) {
        out = "psi(" + a.to_string() + ")";
        return 1;
    }
    if (a.sign == -1 && b.sign == -1 && b.exp == 2 * a.exp) {
        out = "f(" + a.to_string() + ")";
        return 1;
    }
    out = "f(" + a.to_string() + "," + b.to_string() + ")";
    return 1;
}

} // namespace detail

/// Render a combination in the expression grammar, merging equal terms and
/// dropping vanishing ones (print_vanishing keeps them, for diagnostics).
inline std::string to_string(const ThetaCombination& comb, bool print_vanishing = false) {
    // merge identical (shift, factors) terms, then order by shift
    std::vector<ThetaTerm> merged;
    for (const auto& t : comb.terms) {
        if (t.vanishing && !print_vanishing) continue;
        bool found = false;
        for (auto& m : merged)
            if (m.shift == t.shift && m.factors == t.factors && m.vanishing == t.vanishing) {
                m.coeff += t.coeff;
                found = true;
                break;
            }
        if (!found) merged.push_back(t);
    }
    std::stable_sort(merged.begin(), merged.end(), [](const ThetaTerm& x, const ThetaTerm& y) {
        if (x.shift != y.shift) return x.shift < y.shift;
        return x.factors < y.factors;
    });
    std::ostringstream out;
    bool first = true;
    bool any = false;
    for (const auto& t : merged) {
        Int c = t.coeff;
        std::vector<std::string> parts;
        for (const auto& [a, b] : t.factors) {
            std::string s;
            c *= detail::factor_to_string(a, b, s);
            parts.push_back(s);
        }
        if (t.vanishing) {
            // keep the raw factors visible so the vanishing structure shows
            parts.clear();
            c = t.coeff;
            for (const auto& [a, b] : t.factors)
                parts.push_back("f(" + a.to_string() + "," + b.to_string() + ")");
        }
        if (c == 0) continue;
        any = true;
        bool negative = c < 0;
        Int cabs = negative ? Int(-c) : c;
        if (first) {
            if (negative) out << "0 - "; // keeps the output inside the grammar
            first = false;
        } else {
            out << (negative ? " - " : " + ");
        }
        bool need_star = false;
        if (cabs != 1) {
            out << cabs.str();
            need_star = true;
        }
        if (t.shift != 0) {
            if (need_star) out << "*";
            out << "q";
            if (t.shift != 1) out << "^" << t.shift;
            need_star = true;
        }
        for (const auto& p : parts) {
            if (need_star) out << "*";
            out << p;
            need_star = true;
        }
        if (!need_star) out << "1";
    }
    if (!any) return "0";
    return out.str();
}

/// Canonical normal form for structural comparison: rewrite f(1,m) = 2f(m,m^3)
/// so the unit-argument shorthand never hides a factor, sort factors, merge
/// equal terms, drop vanishing ones, and order terms by (shift, factors).
inline ThetaCombination canonical_combination(const ThetaCombination& comb) {
    ThetaCombination out;
    for (ThetaTerm t : comb.terms) {
        if (t.vanishing || t.coeff == 0) continue;
        for (auto& [a, b] : t.factors) {
            if (a.is_one()) {
                t.coeff *= 2;
                a = b;
                b = b.pow(3);
            }
        }
        std::sort(t.factors.begin(), t.factors.end());
        bool merged = false;
        for (auto& m : out.terms)
            if (m.shift == t.shift && m.factors == t.factors) {
                m.coeff += t.coeff;
                merged = true;
                break;
            }
        if (!merged) out.terms.push_back(std::move(t));
    }
    out.terms.erase(std::remove_if(out.terms.begin(), out.terms.end(),
                                   [](const ThetaTerm& t) { return t.coeff == 0; }),
                    out.terms.end());
    std::sort(out.terms.begin(), out.terms.end(), [](const ThetaTerm& x, const ThetaTerm& y) {
        if (x.shift != y.shift) return x.shift < y.shift;
        return x.factors < y.factors;
    });
    return out;
}

/// Structural equality of two combinations up to one global rational monomial
/// factor c q^h (canonicalize first, then compare term lists).
inline bool combinations_match(const ThetaCombination& lhs, const ThetaCombination& rhs) {
    ThetaCombination a = canonical_combination(lhs);
    ThetaCombination b = canonical_combination(rhs);
    if (a.terms.size() != b.terms.size()) return false;
    if (a.terms.empty()) return true;
    i64 h = a.terms[0].shift - b.terms[0].shift;
    Int num = a.terms[0].coeff, den = b.terms[0].coeff;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (a.terms[i].factors != b.terms[i].factors) return false;
        if (a.terms[i].shift != b.terms[i].shift + h) return false;
        if (a.terms[i].coeff * den != b.terms[i].coeff * num) return false;
    }
    return true;
}

/// Scale a combination's variable: q -> q^k (exponents of shifts and factor
/// arguments multiply; coefficients are untouched).
inline ThetaCombination scale_combination(const ThetaCombination& comb, i64 k) {
    ThetaCombination out = comb;
    for (auto& t : out.terms) {
        t.shift *= k;
        for (auto& [a, b] : t.factors) {
            a.exp *= k;
            b.exp *= k;
        }
    }
    return out;
}

/// View an expression as a combination of theta-product terms.  Defined for
/// sums of monomial-coefficient products of theta/phi/psi/Euler factors;
/// quotients (Div, chi, G, H) have no such view and throw.
inline ThetaCombination expr_to_combination(const ThetaExpr& e) {
    using K = ThetaExpr::Kind;
    auto single = [](ThetaTerm t) {
        ThetaCombination c;
        c.terms.push_back(std::move(t));
        return c;
    };
    auto factor_term = [&](MonomialArg a, MonomialArg b) {
        NormalizedTheta nt = normalize_theta(a, b);
        ThetaTerm t;
        t.coeff = nt.coeff;
        t.shift = nt.shift;
        t.vanishing = nt.vanishes();
        t.factors.emplace_back(nt.a, nt.b);
        return single(std::move(t));
    };
    switch (e.kind) {
    case K::Theta:
        return factor_term(e.a, e.b);
    case K::Euler:
        return factor_term(e.a, MonomialArg{e.a.sign, 2 * e.a.exp});
    case K::Phi:
        return factor_term(e.a, e.a);
    case K::Psi:
        return factor_term(e.a, e.a.pow(3));
    case K::Monomial: {
        ThetaTerm t;
        t.coeff = e.coeff;
        t.shift = e.exp;
        return single(std::move(t));
    }
    case K::Add:
    case K::Sub: {
        ThetaCombination l = expr_to_combination(*e.lhs);
        ThetaCombination r = expr_to_combination(*e.rhs);
        for (ThetaTerm t : r.terms) {
            if (e.kind == K::Sub) t.coeff = -t.coeff;
            l.terms.push_back(std::move(t));
        }
        return l;
    }
    case K::Mul: {
        ThetaCombination l = expr_to_combination(*e.lhs);
        ThetaCombination r = expr_to_combination(*e.rhs);
        ThetaCombination out;
        for (const auto& x : l.terms)
            for (const auto& y : r.terms) {
                ThetaTerm t;
                t.coeff = x.coeff * y.coeff;
                t.shift = x.shift + y.shift;
                t.vanishing = x.vanishing || y.vanishing;
                t.factors = x.factors;
                t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
                out.terms.push_back(std::move(t));
            }
        return out;
    }
    case K::Scale: {
        ThetaCombination l = expr_to_combination(*e.lhs);
        for (auto& t : l.terms) t.coeff *= e.coeff;
        return l;
    }
    default:
        throw error("expression is not a plain theta-product combination");
    }
}

/// Substitute X = B Y + R into an extended quadratic form.  Returns the
/// transformed form in Y together with the constant sign (-1)^{delta . R}
/// split off by the substitution; the new character is B^T delta mod 2.
inline std::pair<ExtendedQuadForm, int> transform(const ExtendedQuadForm& f, const IntMatrix& B,
                                                  const std::vector<i64>& r) {
    if (B.n != f.n || static_cast<int>(r.size()) != f.n)
        throw format_error("transform dimension mismatch");
    ExtendedQuadForm g(f.n);
    g.gram2 = matmul(matmul(B.transposed(), f.gram2), B);
    std::vector<i64> g2r = matvec(f.gram2, r); // 2 G R
    std::vector<i64> gr = g2r;
    i64 dot_dr = 0, dot_deltar = 0, rgr = 0;
    for (int i = 0; i < f.n; ++i) {
        gr[static_cast<std::size_t>(i)] += f.lin[static_cast<std::size_t>(i)];
        dot_dr += f.lin[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
        dot_deltar += f.delta[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
        rgr += g2r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < f.n; ++j) {
        i64 lj = 0, dj = 0;
        for (int i = 0; i < f.n; ++i) {
            lj += gr[static_cast<std::size_t>(i)] * B.at(i, j);
            dj += f.delta[static_cast<std::size_t>(i)] * B.at(i, j);
        }
        g.lin[static_cast<std::size_t>(j)] = lj;
        g.delta[static_cast<std::size_t>(j)] = static_cast<int>(mod_floor(dj, 2));
    }
    g.cnst = rgr / 2 + dot_dr + f.cnst;
    return {g, mod_floor(dot_deltar, 2) == 0 ? 1 : -1};
}

/// Factor a diagonalized extended form into a product of theta functions,
/// one per coordinate:
///
///     sum_y (-1)^{e y} q^{m y^2 + l y} = f(u q^{m+l}, u q^{m-l}),  u = (-1)^e.
inline ThetaTerm factor_diagonal(const ExtendedQuadForm& f, int sign) {
    ThetaTerm term;
    term.coeff = sign;
    term.shift = f.cnst;
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j)
            if (i != j && f.gram2.at(i, j) != 0)
                throw not_diagonal_error("quadratic part is not diagonal");
    for (int i = 0; i < f.n; ++i) {
        i64 g = f.gram2.at(i, i);
        if (g <= 0) throw divergence_error("diagonal entry must be positive");
        if (mod_floor(g, 2) != 0)
            throw not_diagonal_error("diagonal quadratic coefficient is not integral");
        i64 m = g / 2;
        i64 l = f.lin[static_cast<std::size_t>(i)];
        int u = f.delta[static_cast<std::size_t>(i)] != 0 ? -1 : 1;
        NormalizedTheta nt = normalize_theta(MonomialArg{u, m + l}, MonomialArg{u, m - l});
        term.coeff *= nt.coeff;
        term.shift += nt.shift;
        if (nt.vanishes()) term.vanishing = true;
        term.factors.emplace_back(nt.a, nt.b);
    }
    return term;
}

namespace detail {

inline void check_expansion(const ThetaCombination& comb, const QSeries& reference,
                            i64 check_order, const char* what) {
    i64 n = std::min(check_order, reference.order());
    if (first_mismatch(comb.series(n), reference, n) != n)
        throw error(std::string(what) + ": expansion disagrees with the direct series");
}

inline i64 auto_check_order(const ThetaCombination& comb, i64 requested) {
    if (requested > 0) return requested;
    return std::max<i64>(100, 2 * comb.max_arg_exponent());
}

} // namespace detail

/// Expand an extended quadratic form along a coset system whose matrix
/// diagonalizes it: one theta-product term per representative.  The result is
/// re-checked numerically against the direct lattice sum before returning
/// (check_order <= 0 picks 2 * max theta exponent, at least 100).
inline ThetaCombination expand(const ExtendedQuadForm& f, const CosetSystem& cs,
                               i64 check_order = 0) {
    if (!verify_ecs(cs)) throw ecs_error("coset system is not an exact cover");
    ThetaCombination comb;
    for (const auto& r : cs.reps) {
        auto [g, sign] = transform(f, cs.B, r);
        comb.terms.push_back(factor_diagonal(g, sign));
    }
    i64 n = detail::auto_check_order(comb, check_order);
    detail::check_expansion(comb, direct_series(f, n), n, "expand");
    return comb;
}

/// Theta-product view of f(a1,b1) f(a2,b2) as an extended quadratic form.
/// Arguments of mixed sign need the classical rewrite f(1, x) = 2 f(x, x^3)
/// first; if signs still differ inside a pair, no (-1)^{delta.X} character
/// can express the summand and this conversion refuses.
struct ProductForm {
    ExtendedQuadForm form;
    Int multiplier = 1; // product series = multiplier * form series (in q^scale)
    i64 scale = 1;      // 1 or 2: form lives in q^scale
    bool zero = false;  // some factor was f(-1, x)
};

inline ProductForm product_to_extended_form(std::vector<std::pair<MonomialArg, MonomialArg>> args) {
    ProductForm pf;
    pf.form = ExtendedQuadForm(static_cast<int>(args.size()));
    for (auto& [a, b] : args) {
        if (a.is_minus_one() || b.is_minus_one()) {
            pf.zero = true;
            return pf;
        }
        if (a.is_one() && b.sign < 0) {
            a = b;
            b = b.pow(3);
            pf.multiplier *= 2;
        } else if (b.is_one() && a.sign < 0) {
            b = a.pow(3);
            pf.multiplier *= 2;
        }
        if (a.sign != b.sign)
            throw error("mixed-sign theta pair has no quadratic-form character");
    }
    bool need_double = false;
    for (const auto& [a, b] : args)
        if (mod_floor(a.exp + b.exp, 2) != 0) need_double = true;
    pf.scale = need_double ? 2 : 1;
    for (std::size_t i = 0; i < args.size(); ++i) {
        auto [a, b] = args[i];
        i64 ea = a.exp * pf.scale, eb = b.exp * pf.scale;
        pf.form.gram2.at(static_cast<int>(i), static_cast<int>(i)) = ea + eb;
        pf.form.lin[i] = (ea - eb) / 2;
        pf.form.delta[i] = a.sign < 0 ? 1 : 0;
    }
    return pf;
}

/// Product of two theta functions expanded along the simple ECS
/// { B Z^2 + i e_1 }.  Implements the closed-form term list directly from
/// the coset substitution, which keeps mixed-sign arguments (like f(1,-q))
/// exact: signs ride along as powers of the argument signs.
///
/// Preconditions: with m_i the argument exponent sums,
/// m1 b11 b12 + m2 b21 b22 = 0 (the transformed form is diagonal) and
/// gcd(b21, b22) = 1 (shifts along e_1 tile Z^2).
inline ThetaCombination expand_product(const MonomialArg& a1, const MonomialArg& b1,
                                       const MonomialArg& a2, const MonomialArg& b2,
                                       const IntMatrix& B, i64 check_order = 0) {
    if (B.n != 2) throw format_error("expand_product needs a 2x2 matrix");
    i64 m1 = a1.exp + b1.exp, m2 = a2.exp + b2.exp;
    if (m1 < 1 || m2 < 1) throw divergence_error("theta exponent sums must be positive");
    i64 b11 = B.at(0, 0), b12 = B.at(0, 1), b21 = B.at(1, 0), b22 = B.at(1, 1);
    if (m1 * b11 * b12 + m2 * b21 * b22 != 0)
        throw not_diagonal_error("matrix does not diagonalize the product form");
    if (gcd64(b21 < 0 ? -b21 : b21, b22 < 0 ? -b22 : b22) != 1)
        throw ecs_error("gcd(b21, b22) must be 1 for shifts along e1");
    i64 k = det(B);
    if (k == 0) throw ecs_error("singular matrix");
    k = k < 0 ? -k : k;

    ThetaCombination comb;
    for (i64 i = -((k - 1) / 2); i <= k / 2; ++i) {
        MonomialArg pre = a1.pow(tri_up(i)) * b1.pow(tri_down(i));
        MonomialArg arg1 = a1.pow(tri_up(b11) + b11 * i) * b1.pow(tri_down(b11) + b11 * i) *
                           a2.pow(tri_up(b21)) * b2.pow(tri_down(b21));
        MonomialArg arg2 = a1.pow(tri_down(b11) - b11 * i) * b1.pow(tri_up(b11) - b11 * i) *
                           a2.pow(tri_down(b21)) * b2.pow(tri_up(b21));
        MonomialArg arg3 = a1.pow(tri_up(b12) + b12 * i) * b1.pow(tri_down(b12) + b12 * i) *
                           a2.pow(tri_up(b22)) * b2.pow(tri_down(b22));
        MonomialArg arg4 = a1.pow(tri_down(b12) - b12 * i) * b1.pow(tri_up(b12) - b12 * i) *
                           a2.pow(tri_down(b22)) * b2.pow(tri_up(b22));
        ThetaTerm term;
        term.coeff = pre.sign;
        term.shift = pre.exp;
        for (auto [x, y] : {std::pair{arg1, arg2}, std::pair{arg3, arg4}}) {
            NormalizedTheta nt = normalize_theta(x, y);
            term.coeff *= nt.coeff;
            term.shift += nt.shift;
            if (nt.vanishes()) term.vanishing = true;
            term.factors.emplace_back(nt.a, nt.b);
        }
        comb.terms.push_back(term);
    }
    i64 n = detail::auto_check_order(comb, check_order);
    detail::check_expansion(comb, mul(theta_series(a1, b1, n), theta_series(a2, b2, n)), n,
                            "expand_product");
    return comb;
}

} // namespace thetaforge
