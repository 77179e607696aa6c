#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "monomial.hpp"
#include "qseries.hpp"

namespace thetaforge {

// Ramanujan's general theta function
//
//     f(a,b) = sum_{n in Z} a^{n(n+1)/2} b^{n(n-1)/2},
//
// here always with monomial arguments a = s q^j, b = t q^k.  The n-th term
// has exponent (j+k) n^2/2 + (j-k) n/2, quadratic with positive leading
// coefficient whenever j+k >= 1, so the summation range for a given
// truncation order is computed, not guessed.

inline i64 tri_up(i64 n) { return n * (n + 1) / 2; }   // n(n+1)/2
inline i64 tri_down(i64 n) { return n * (n - 1) / 2; } // n(n-1)/2

namespace detail {

inline int sign_pow(int s, i64 n) { return (s < 0 && (n % 2 != 0)) ? -1 : 1; }

inline i64 theta_term_exp(const MonomialArg& a, const MonomialArg& b, i64 n) {
    return a.exp * tri_up(n) + b.exp * tri_down(n);
}

inline int theta_term_sign(const MonomialArg& a, const MonomialArg& b, i64 n) {
    return sign_pow(a.sign, tri_up(n)) * sign_pow(b.sign, tri_down(n));
}

} // namespace detail

inline QSeries theta_series_nocache(const MonomialArg& a, const MonomialArg& b, i64 order) {
    if (a.exp + b.exp < 1)
        throw divergence_error("theta arguments need exponent sum >= 1, got " +
                               a.to_string() + ", " + b.to_string());
    QSeries r(order);
    // Past the vertex of the exponent parabola the terms grow; stop once both
    // directions have left the window.
    i64 vertex = std::abs(a.exp - b.exp) / (a.exp + b.exp) + 1;
    for (i64 n = 0;; ++n) {
        bool alive = false;
        i64 e = detail::theta_term_exp(a, b, n);
        if (e < order) {
            alive = true;
            r.add_coeff(e, detail::theta_term_sign(a, b, n));
        }
        if (n > 0) {
            i64 e2 = detail::theta_term_exp(a, b, -n);
            if (e2 < order) {
                alive = true;
                r.add_coeff(e2, detail::theta_term_sign(a, b, -n));
            }
        }
        if (!alive && n > vertex) break;
    }
    return r;
}

/// Memoized theta evaluation.  The cache is thread_local: it is an
/// optimization only and never part of the semantics.
inline QSeries theta_series(const MonomialArg& a, const MonomialArg& b, i64 order) {
    using Key = std::tuple<int, i64, int, i64, i64>;
    thread_local std::map<Key, QSeries> cache;
    Key key{a.sign, a.exp, b.sign, b.exp, order};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    QSeries r = theta_series_nocache(a, b, order);
    if (cache.size() > 4096) cache.clear();
    cache.emplace(key, r);
    return r;
}

/// Result of rewriting f(a,b) = coeff * q^shift * f(a',b') with
/// 0 <= e(a') <= e(b').  A factor f(-1, x) is identically zero; the caller
/// checks a'.is_minus_one() for that.
struct NormalizedTheta {
    int coeff = 1; // +-1
    i64 shift = 0;
    MonomialArg a, b;

    bool vanishes() const { return a.is_minus_one(); }
};

/// Canonicalize theta arguments using f(a,b) = f(b,a) and the shift law
///
///     f(a,b) = a^{n(n+1)/2} b^{n(n-1)/2} f(a(ab)^n, b(ab)^{-n}).
///
/// Exponents may be negative on input; the exponent sum must be positive.
inline NormalizedTheta normalize_theta(MonomialArg a, MonomialArg b) {
    i64 m = a.exp + b.exp;
    if (m < 1)
        throw divergence_error("cannot normalize theta with exponent sum " + std::to_string(m));
    i64 n = -floor_div(a.exp, m);
    MonomialArg ab = a * b;
    MonomialArg factor = a.pow(tri_up(n)) * b.pow(tri_down(n));
    MonomialArg a2 = a * ab.pow(n);
    MonomialArg b2 = b * ab.pow(-n);
    if (a2.exp > b2.exp) std::swap(a2, b2);
    return NormalizedTheta{factor.sign, factor.exp, a2, b2};
}

/// One term of the k-dissection of f(a,b): prefactor * f(arg1, arg2).
struct DissectionTerm {
    MonomialArg prefactor;
    MonomialArg arg1, arg2;
};

/// Split the theta sum by the residue r of the index mod k:
///
///     f(a,b) = sum_{r=0}^{k-1} a^{r(r+1)/2} b^{r(r-1)/2}
///              f(a^{k(k+1)/2+kr} b^{k(k-1)/2+kr}, a^{k(k-1)/2-kr} b^{k(k+1)/2-kr}).
inline std::vector<DissectionTerm> dissect_theta(const MonomialArg& a, const MonomialArg& b,
                                                 i64 k) {
    if (k < 1) throw error("dissection requires k >= 1");
    if (a.exp + b.exp < 1)
        throw divergence_error("cannot dissect a divergent theta");
    std::vector<DissectionTerm> terms;
    terms.reserve(static_cast<std::size_t>(k));
    for (i64 r = 0; r < k; ++r) {
        DissectionTerm t;
        t.prefactor = a.pow(tri_up(r)) * b.pow(tri_down(r));
        t.arg1 = a.pow(tri_up(k) + k * r) * b.pow(tri_down(k) + k * r);
        t.arg2 = a.pow(tri_down(k) - k * r) * b.pow(tri_up(k) - k * r);
        terms.push_back(t);
    }
    return terms;
}

/// Truncated infinite product (x; y)_inf = prod_{j>=0} (1 - x y^j), stopping
/// at the first factor whose lowest exponent reaches the order.
inline QSeries pochhammer_inf(const MonomialArg& x, const MonomialArg& y, i64 order) {
    if (y.exp < 1) throw divergence_error("pochhammer step needs positive exponent");
    if (x.exp < 0) throw divergence_error("pochhammer start needs exponent >= 0");
    QSeries r = QSeries::one(order);
    for (i64 j = 0;; ++j) {
        i64 e = x.exp + j * y.exp;
        if (e >= order) break;
        int s = x.sign * detail::sign_pow(y.sign, j);
        QSeries factor = QSeries::one(order);
        factor.add_coeff(e, -s); // (1 - 1) at e = 0 collapses to the zero series
        r = mul(r, factor);
        if (r.is_zero()) break;
    }
    return r;
}

// Classical specializations.  phi, psi and the one-argument Euler form are
// theta sums; chi is not a theta function and is evaluated as a product.

inline QSeries phi_series(const MonomialArg& m, i64 order) {
    return theta_series(m, m, order); // f(m, m)
}

inline QSeries psi_series(const MonomialArg& m, i64 order) {
    return theta_series(m, m.pow(3), order); // f(m, m^3)
}

/// One-argument convention f(m) := f(m, m^2 with m's sign), so that
/// f(-q^k) = f(-q^k, -q^{2k}) = (q^k; q^k)_inf.
inline QSeries euler_series(const MonomialArg& m, i64 order) {
    return theta_series(m, MonomialArg{m.sign, 2 * m.exp}, order);
}

inline QSeries chi_series(const MonomialArg& m, i64 order) {
    if (m.exp < 1) throw divergence_error("chi needs a nonconstant argument");
    return pochhammer_inf(m.negated(), MonomialArg{+1, 2 * m.exp}, order); // (-m; m^2)_inf
}

/// Rogers-Ramanujan G as a theta quotient, extended to any monomial argument
/// by substitution: G(m) = f(-m^2, -m^3) / f(-m, -m^2).
inline QSeries rr_g_series(const MonomialArg& m, i64 order) {
    if (m.exp < 1) throw divergence_error("G needs a nonconstant argument");
    QSeries num = theta_series(m.pow(2).negated(), m.pow(3).negated(), order);
    QSeries den = theta_series(m.negated(), m.pow(2).negated(), order);
    return mul(num, den.inverted());
}

/// H(m) = f(-m, -m^4) / f(-m, -m^2).
inline QSeries rr_h_series(const MonomialArg& m, i64 order) {
    if (m.exp < 1) throw divergence_error("H needs a nonconstant argument");
    QSeries num = theta_series(m.negated(), m.pow(4).negated(), order);
    QSeries den = theta_series(m.negated(), m.pow(2).negated(), order);
    return mul(num, den.inverted());
}

} // namespace thetaforge
