#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "qseries.hpp"

namespace thetaforge {

/// Integer quadratic form plus linear part, constant, and sign character:
///
///     (-1)^{delta . X} q^{X^T G X + lin . X + cnst},   X in Z^n.
///
/// The Gram matrix G may have half-integer off-diagonal entries (odd cross
/// coefficients), so the doubled matrix 2G is stored and arithmetic stays in
/// integers: X^T (2G) X is always even.
struct ExtendedQuadForm {
    int n = 0;
    IntMatrix gram2;         // 2G, symmetric
    std::vector<i64> lin;    // coefficient of x_i
    i64 cnst = 0;
    std::vector<int> delta;  // 0/1 character exponents

    ExtendedQuadForm() = default;

    explicit ExtendedQuadForm(int dim)
        : n(dim), gram2(dim), lin(static_cast<std::size_t>(dim), 0),
          delta(static_cast<std::size_t>(dim), 0) {}

    /// Binary form a x1^2 + two_b x1 x2 + c x2^2 + d x1 + e x2 + f.
    static ExtendedQuadForm binary(i64 a, i64 two_b, i64 c, i64 d = 0, i64 e = 0, i64 f = 0,
                                   int d1 = 0, int d2 = 0) {
        ExtendedQuadForm q(2);
        q.gram2.at(0, 0) = 2 * a;
        q.gram2.at(0, 1) = two_b;
        q.gram2.at(1, 0) = two_b;
        q.gram2.at(1, 1) = 2 * c;
        q.lin = {d, e};
        q.cnst = f;
        q.delta = {d1, d2};
        return q;
    }

    /// Coefficient of x_i x_j (i <= j) as in the coefficient-map view.
    i64 quad_coeff(int i, int j) const { return i == j ? gram2.at(i, i) / 2 : gram2.at(i, j); }

    i64 quad_value(const std::vector<i64>& x) const {
        i64 s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += gram2.at(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        return s / 2;
    }

    /// (sign, exponent) of the summand at lattice point X.
    std::pair<int, i64> eval(const std::vector<i64>& x) const {
        i64 e = quad_value(x) + cnst;
        i64 dotd = 0;
        for (int i = 0; i < n; ++i) {
            e += lin[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
            dotd += delta[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        }
        return {mod_floor(dotd, 2) == 0 ? 1 : -1, e};
    }

    /// Positive definiteness via leading principal minors of 2G.
    bool positive_definite() const {
        for (int k = 1; k <= n; ++k) {
            IntMatrix sub(k);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) sub.at(r, c) = gram2.at(r, c);
            if (det(sub) <= 0) return false;
        }
        return true;
    }
};

inline std::pair<int, i64> eval_form(const ExtendedQuadForm& f, const std::vector<i64>& x) {
    return f.eval(x);
}

/// Exact lattice sum of (-1)^{delta.X} q^{F(X)} over all X with F(X) < order.
/// The enumeration box is exact: completing the square gives
/// (x_i + h_i)^2 <= M * (G^{-1})_{ii} with M the largest reachable quadratic
/// value, evaluated in rational arithmetic via the adjugate.
inline QSeries direct_series(const ExtendedQuadForm& f, i64 order) {
    if (!f.positive_definite())
        throw divergence_error("lattice sum needs a positive definite quadratic part");
    const int n = f.n;
    // Center: X^T G X + lin.X + c = (X+h)^T G (X+h) + c - h^T G h,
    // h = G^{-1} lin / 2 = adj(2G) lin / det(2G).
    i64 det2 = det(f.gram2);
    IntMatrix adj2 = adjugate(f.gram2);
    std::vector<i64> hnum = matvec(adj2, f.lin); // h_i = hnum_i / det2
    // min value = cnst - lin.hnum/(2 det2); bound M on the centered quadratic:
    // (X+h)^T G (X+h) <= order - 1 - cnst + lin.hnum/(2 det2).
    Int lin_h = 0;
    for (int i = 0; i < n; ++i) lin_h += Int(f.lin[static_cast<std::size_t>(i)]) * hnum[static_cast<std::size_t>(i)];
    // Work with 2*det2*M to stay integral: M2 = 2*det2*(order-1-cnst) + lin_h... careful:
    // M = (order-1-cnst) + lin.hnum/(2*det2)  ==>  M * 2*det2 = 2*det2*(order-1-cnst) + lin_h.
    Int M_scaled = Int(2) * det2 * (Int(order) - 1 - f.cnst) + lin_h;
    QSeries r(order);
    if (M_scaled < 0) return r;
    // (x_i + h_i)^2 <= M * adj2_ii / det2  (since (G^{ -1})_{ii} = 2*adj2_ii/det2)
    std::vector<i64> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // bound^2 <= M * 2*adj2_ii / det2 = M_scaled * adj2_ii / det2^2
        Int num = M_scaled * adj2.at(i, i);
        i64 b = floor_sqrt_ratio(num, Int(det2) * det2);
        // center h_i = hnum_i / det2, rounded outward
        i64 hfloor = floor_div(hnum[static_cast<std::size_t>(i)], det2);
        lo[static_cast<std::size_t>(i)] = -b - hfloor - 2;
        hi[static_cast<std::size_t>(i)] = b - hfloor + 2;
    }
    std::vector<i64> x(lo);
    for (;;) {
        auto [sign, e] = f.eval(x);
        if (e < order) r.add_coeff(e, sign);
        int i = n - 1;
        while (i >= 0) {
            if (++x[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]) break;
            x[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
            --i;
        }
        if (i < 0) break;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Binary quadratic forms (a, 2b, c) in the Gauss convention: the middle
// coefficient is even and the determinant is ac - b^2.
// ---------------------------------------------------------------------------

struct BinaryForm {
    i64 a = 0, two_b = 0, c = 0;

    BinaryForm() = default;
    BinaryForm(i64 a_, i64 two_b_, i64 c_) : a(a_), two_b(two_b_), c(c_) {
        if (mod_floor(two_b, 2) != 0)
            throw format_error("binary form middle coefficient must be even (Gauss convention)");
    }

    i64 b() const { return two_b / 2; }
    i64 determinant() const { return a * c - b() * b(); }
    bool positive_definite() const { return a > 0 && determinant() > 0; }
    bool primitive() const { return gcd64(gcd64(a, two_b), c) == 1; }
    bool reduced() const {
        i64 tb = two_b < 0 ? -two_b : two_b;
        return tb <= a && a <= c;
    }

    i64 value(i64 x, i64 y) const { return a * x * x + two_b * x * y + c * y * y; }

    IntMatrix gram() const { return IntMatrix(2, {a, b(), b(), c}); }

    bool operator==(const BinaryForm& o) const {
        return a == o.a && two_b == o.two_b && c == o.c;
    }
    bool operator<(const BinaryForm& o) const {
        if (a != o.a) return a < o.a;
        if (two_b != o.two_b) return two_b < o.two_b;
        return c < o.c;
    }

    std::string to_string() const {
        return "(" + std::to_string(a) + ", " + std::to_string(two_b) + ", " +
               std::to_string(c) + ")";
    }
};

/// Gauss reduction.  Returns the reduced equivalent together with the
/// unimodular change of basis U, U^T Gram U = Gram(reduced).
inline std::pair<BinaryForm, IntMatrix> reduce_binary(const BinaryForm& f) {
    if (!f.positive_definite())
        throw divergence_error("reduction requires a positive definite form");
    i64 a = f.a, b = f.b(), c = f.c;
    IntMatrix u = IntMatrix::identity(2);
    auto apply = [&](const IntMatrix& step) { u = matmul(u, step); };
    for (;;) {
        if (c < a) {
            std::swap(a, c);
            b = -b;
            apply(IntMatrix(2, {0, -1, 1, 0}));
            continue;
        }
        if (2 * (b < 0 ? -b : b) > a) {
            // translate x -> x - k y to bring |2b| <= a
            i64 k = floor_div(2 * b + a, 2 * a);
            c += k * k * a - 2 * k * b;
            b -= k * a;
            apply(IntMatrix(2, {1, -k, 0, 1}));
            continue;
        }
        break;
    }
    // boundary normalization: prefer 2b >= 0 when |2b| = a or a = c
    if (b < 0 && (2 * -b == a || a == c)) {
        b = -b;
        apply(IntMatrix(2, {-1, 0, 0, 1}));
    }
    return {BinaryForm(a, 2 * b, c), u};
}

/// All (a, 2b, c) with ac - b^2 = D, |2b| <= a <= c, gcd(a, 2b, c) = 1,
/// sorted lexicographically; the loop bound a <= sqrt(4D/3) is standard.
inline std::vector<BinaryForm> enumerate_reduced_primitive(i64 D) {
    if (D < 1) throw error("determinant must be positive");
    std::vector<BinaryForm> out;
    for (i64 a = 1; 3 * a * a <= 4 * D; ++a) {
        for (i64 b = -(a / 2); 2 * b <= a; ++b) {
            if (-2 * b > a) continue;
            i64 num = D + b * b;
            if (num % a != 0) continue;
            i64 c = num / a;
            if (c < a) continue;
            BinaryForm f(a, 2 * b, c);
            if (!f.primitive()) continue;
            out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// All integer solutions of f(x, y) = m, sorted lexicographically.  Bounds
/// come from the adjugate diagonal: D x^2 <= m c and D y^2 <= m a.
inline std::vector<std::pair<i64, i64>> represent(const BinaryForm& f, i64 m) {
    if (!f.positive_definite())
        throw divergence_error("representation search requires a positive definite form");
    if (m < 0) return {};
    std::vector<std::pair<i64, i64>> out;
    i64 D = f.determinant();
    i64 bx = floor_sqrt_ratio(Int(m) * f.c, Int(D));
    i64 by = floor_sqrt_ratio(Int(m) * f.a, Int(D));
    for (i64 x = -bx; x <= bx; ++x)
        for (i64 y = -by; y <= by; ++y)
            if (f.value(x, y) == m) out.emplace_back(x, y);
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

/// v^T (2G) w, the doubled inner product.
inline i64 gram2_pair(const IntMatrix& g2, const std::vector<i64>& v, const std::vector<i64>& w) {
    i64 s = 0;
    for (int i = 0; i < g2.n; ++i)
        for (int j = 0; j < g2.n; ++j) s += g2.at(i, j) * v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    return s;
}

/// All v in the box |v_i| <= bound with v^T G v = t.
inline std::vector<std::vector<i64>> represent_gram(const IntMatrix& g2, i64 t, i64 bound) {
    std::vector<std::vector<i64>> out;
    int n = g2.n;
    std::vector<i64> v(static_cast<std::size_t>(n), -bound);
    for (;;) {
        if (gram2_pair(g2, v, v) == 2 * t) out.push_back(v);
        int i = n - 1;
        while (i >= 0) {
            if (++v[static_cast<std::size_t>(i)] <= bound) break;
            v[static_cast<std::size_t>(i)] = -bound;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

/// Canonical sign choice: each column's first nonzero entry positive, then
/// det > 0 restored (if possible) by flipping the last column.
inline IntMatrix canonicalize_columns(IntMatrix m) {
    for (int c = 0; c < m.n; ++c) {
        int first = 0;
        for (int r = 0; r < m.n; ++r)
            if (m.at(r, c) != 0) {
                first = r;
                break;
            }
        if (m.at(first, c) < 0)
            for (int r = 0; r < m.n; ++r) m.at(r, c) = -m.at(r, c);
    }
    if (det(m) < 0)
        for (int r = 0; r < m.n; ++r) m.at(r, m.n - 1) = -m.at(r, m.n - 1);
    return m;
}

} // namespace detail

/// All integer B (entries bounded) with B^T G B = diag(target), deduplicated
/// up to per-column sign flips.  Columns are candidate representations of the
/// target values, assembled under pairwise G-orthogonality.
inline std::vector<IntMatrix> find_congruence_matrices(const IntMatrix& gram2,
                                                       const std::vector<i64>& target,
                                                       i64 entry_bound) {
    const int n = gram2.n;
    if (static_cast<int>(target.size()) != n)
        throw format_error("target diagonal size must match the Gram dimension");
    if (entry_bound < 1) throw error("entry bound must be >= 1");
    std::vector<std::vector<std::vector<i64>>> candidates;
    candidates.reserve(static_cast<std::size_t>(n));
    for (i64 t : target)
        candidates.push_back(detail::represent_gram(gram2, t, entry_bound));

    std::set<IntMatrix> found;
    std::vector<std::vector<i64>> cols(static_cast<std::size_t>(n));
    auto assemble = [&](auto&& self, int k) -> void {
        if (k == n) {
            IntMatrix b(n);
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n; ++r) b.at(r, c) = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
            if (det(b) == 0) return;
            found.insert(detail::canonicalize_columns(b));
            return;
        }
        for (const auto& v : candidates[static_cast<std::size_t>(k)]) {
            bool ok = true;
            for (int j = 0; j < k && ok; ++j)
                if (detail::gram2_pair(gram2, cols[static_cast<std::size_t>(j)], v) != 0) ok = false;
            if (!ok) continue;
            cols[static_cast<std::size_t>(k)] = v;
            self(self, k + 1);
        }
    };
    assemble(assemble, 0);
    return {found.begin(), found.end()};
}

/// Default column bound: 1 + ceil(sqrt(max target / min diagonal pivot of G)),
/// with the pivot estimated by the smallest diagonal entry of the LDL^T
/// decomposition computed on 2G.
inline i64 default_entry_bound(const IntMatrix& gram2, const std::vector<i64>& target) {
    // rational LDL pivots of 2G: d_1 = g_11, d_k = det(k-minor)/det((k-1)-minor)
    i64 max_t = 1;
    for (i64 t : target) max_t = std::max(max_t, t);
    Int prev = 1;
    Int min_num = 0, min_den = 1; // min pivot as fraction num/den of 2G
    for (int k = 1; k <= gram2.n; ++k) {
        IntMatrix sub(k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) sub.at(r, c) = gram2.at(r, c);
        Int dk = det(sub);
        if (dk <= 0) throw divergence_error("Gram matrix is not positive definite");
        if (min_num == 0 || dk * min_den < min_num * prev) {
            min_num = dk;
            min_den = prev;
        }
        prev = dk;
    }
    // pivot of G = pivot of 2G / 2; bound = 1 + ceil(sqrt(max_t / pivot))
    i64 s = floor_sqrt_ratio(Int(max_t) * 2 * min_den, min_num);
    return s + 2;
}

// ---------------------------------------------------------------------------
// Text form syntax:
//   binary:  "quad: 3,2,4 | lin: 1,4 | const: 0 | delta: 1,0"
//   general: "gram2: 2,0,1;0,2,1;1,1,4 | lin: 0,0,0 | const: 0 | delta: 0,0,0"
// (gram2 rows are the doubled Gram matrix, so odd cross coefficients stay
// integral).  Omitted fields default to zero.
// ---------------------------------------------------------------------------

inline ExtendedQuadForm parse_form(const std::string& text) {
    ExtendedQuadForm f;
    bool have_quad = false;
    std::istringstream in(text);
    std::string part;
    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t");
        std::size_t e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::vector<i64> lin;
    std::vector<int> delta;
    i64 cnst = 0;
    while (std::getline(in, part, '|')) {
        part = trim(part);
        std::size_t colon = part.find(':');
        if (colon == std::string::npos) throw format_error("bad form field '" + part + "'");
        std::string key = trim(part.substr(0, colon));
        std::string val = trim(part.substr(colon + 1));
        if (key == "quad") {
            std::vector<i64> v = parse_vector(val);
            if (v.size() != 3) throw format_error("quad needs 'a,2b,c'");
            f = ExtendedQuadForm::binary(v[0], v[1], v[2]);
            have_quad = true;
        } else if (key == "gram2") {
            IntMatrix g2 = parse_matrix(val);
            f = ExtendedQuadForm(g2.n);
            f.gram2 = g2;
            have_quad = true;
        } else if (key == "lin") {
            lin = parse_vector(val);
        } else if (key == "const") {
            cnst = std::stoll(val);
        } else if (key == "delta") {
            for (i64 d : parse_vector(val)) delta.push_back(static_cast<int>(mod_floor(d, 2)));
        } else {
            throw format_error("unknown form field '" + key + "'");
        }
    }
    if (!have_quad) throw format_error("form needs a quad or gram2 field");
    if (!lin.empty()) {
        if (static_cast<int>(lin.size()) != f.n) throw format_error("lin size mismatch");
        f.lin = lin;
    }
    if (!delta.empty()) {
        if (static_cast<int>(delta.size()) != f.n) throw format_error("delta size mismatch");
        f.delta = delta;
    }
    f.cnst = cnst;
    return f;
}

inline std::string form_to_string(const ExtendedQuadForm& f) {
    std::ostringstream out;
    if (f.n == 2 && mod_floor(f.gram2.at(0, 0), 2) == 0 && mod_floor(f.gram2.at(1, 1), 2) == 0)
        out << "quad: " << f.gram2.at(0, 0) / 2 << "," << f.gram2.at(0, 1) << ","
            << f.gram2.at(1, 1) / 2;
    else
        out << "gram2: " << f.gram2.to_string();
    out << " | lin: " << vector_to_string(f.lin);
    out << " | const: " << f.cnst;
    out << " | delta: ";
    for (std::size_t i = 0; i < f.delta.size(); ++i) {
        if (i) out << ",";
        out << f.delta[i];
    }
    return out.str();
}

} // namespace thetaforge
