#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ints.hpp"

namespace thetaforge {

/// Dense square integer matrix, row-major.  Dimensions here are tiny (n <= 4);
/// clarity beats asymptotics throughout.
struct IntMatrix {
    int n = 0;
    std::vector<i64> e;

    IntMatrix() = default;
    explicit IntMatrix(int dim) : n(dim), e(static_cast<std::size_t>(dim) * dim, 0) {}
    IntMatrix(int dim, std::vector<i64> entries) : n(dim), e(std::move(entries)) {}

    static IntMatrix identity(int dim) {
        IntMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
        return m;
    }

    i64& at(int r, int c) { return e[static_cast<std::size_t>(r) * n + c]; }
    i64 at(int r, int c) const { return e[static_cast<std::size_t>(r) * n + c]; }

    std::vector<i64> column(int c) const {
        std::vector<i64> v(n);
        for (int r = 0; r < n; ++r) v[r] = at(r, c);
        return v;
    }

    IntMatrix transposed() const {
        IntMatrix t(n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    bool operator==(const IntMatrix& o) const { return n == o.n && e == o.e; }
    bool operator<(const IntMatrix& o) const { return e < o.e; }

    std::string to_string() const {
        std::ostringstream out;
        for (int r = 0; r < n; ++r) {
            if (r) out << ";";
            for (int c = 0; c < n; ++c) {
                if (c) out << ",";
                out << at(r, c);
            }
        }
        return out.str();
    }
};

inline IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix r(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) {
            i64 s = 0;
            for (int k = 0; k < a.n; ++k) s += a.at(i, k) * b.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

inline std::vector<i64> matvec(const IntMatrix& a, const std::vector<i64>& v) {
    std::vector<i64> r(a.n, 0);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) r[i] += a.at(i, k) * v[k];
    return r;
}

namespace detail {

inline i64 det_recursive(const IntMatrix& m, std::vector<int> cols, int row) {
    if (cols.size() == 1) return m.at(row, cols[0]);
    i64 acc = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        std::vector<int> rest;
        rest.reserve(cols.size() - 1);
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (j != i) rest.push_back(cols[j]);
        i64 minor = det_recursive(m, rest, row + 1);
        i64 term = m.at(row, cols[i]) * minor;
        acc += (i % 2 == 0) ? term : -term;
    }
    return acc;
}

} // namespace detail

inline i64 det(const IntMatrix& m) {
    std::vector<int> cols(static_cast<std::size_t>(m.n));
    for (int i = 0; i < m.n; ++i) cols[static_cast<std::size_t>(i)] = i;
    return detail::det_recursive(m, cols, 0);
}

/// Adjugate: B * adjugate(B) = det(B) * I.
inline IntMatrix adjugate(const IntMatrix& m) {
    if (m.n == 1) return IntMatrix(1, {1});
    IntMatrix adj(m.n);
    for (int r = 0; r < m.n; ++r)
        for (int c = 0; c < m.n; ++c) {
            // cofactor C_{r,c}, placed transposed
            IntMatrix minor(m.n - 1);
            for (int i = 0, mi = 0; i < m.n; ++i) {
                if (i == r) continue;
                for (int j = 0, mj = 0; j < m.n; ++j) {
                    if (j == c) continue;
                    minor.at(mi, mj) = m.at(i, j);
                    ++mj;
                }
                ++mi;
            }
            i64 cof = det(minor);
            if ((r + c) % 2 != 0) cof = -cof;
            adj.at(c, r) = cof;
        }
    return adj;
}

/// True iff v lies in the lattice B Z^n, i.e. B y = v has an integer
/// solution.  Tested as adjugate(B) v == 0 mod det(B), all in integers.
inline bool lattice_member(const IntMatrix& B, const std::vector<i64>& v) {
    i64 d = det(B);
    if (d == 0) throw ecs_error("lattice test requires nonsingular matrix");
    std::vector<i64> w = matvec(adjugate(B), v);
    for (i64 x : w)
        if (mod_floor(x, d < 0 ? -d : d) != 0) return false;
    return true;
}

/// Simple covering matrix criterion: some column j of the adjugate has
/// coprime entries; the shifts i*e_j, i = 0..|det|-1 then tile Z^n.
/// Returns the smallest such 1-based j with k = |det|, or nothing.
inline std::optional<std::pair<int, i64>> is_simple_covering(const IntMatrix& B) {
    i64 d = det(B);
    if (d == 0) throw ecs_error("covering test requires nonsingular matrix");
    IntMatrix adj = adjugate(B);
    for (int j = 0; j < B.n; ++j) {
        i64 g = 0;
        for (int r = 0; r < B.n; ++r) g = gcd64(g, adj.at(r, j) < 0 ? -adj.at(r, j) : adj.at(r, j));
        if (g == 1) return std::make_pair(j + 1, d < 0 ? -d : d);
    }
    return std::nullopt;
}

/// Matrix B together with coset representatives R_1..R_k of Z^n / B Z^n.
struct CosetSystem {
    IntMatrix B;
    std::vector<std::vector<i64>> reps;

    /// Shifts i * e_j for i in [lo, hi], the simple-ECS shape.
    static CosetSystem along_axis(IntMatrix B, int j_one_based, i64 lo, i64 hi) {
        CosetSystem cs;
        cs.B = std::move(B);
        for (i64 i = lo; i <= hi; ++i) {
            std::vector<i64> r(static_cast<std::size_t>(cs.B.n), 0);
            r[static_cast<std::size_t>(j_one_based - 1)] = i;
            cs.reps.push_back(std::move(r));
        }
        return cs;
    }
};

/// Exact-cover check: |reps| = |det B| and representatives pairwise
/// non-congruent mod B Z^n.  Since Z^n / B Z^n has exactly |det B| cosets,
/// this is equivalent to the reps tiling Z^n.
inline bool verify_ecs(const CosetSystem& cs) {
    i64 d = det(cs.B);
    if (d == 0) return false;
    i64 k = d < 0 ? -d : d;
    if (static_cast<i64>(cs.reps.size()) != k) return false;
    for (std::size_t i = 0; i < cs.reps.size(); ++i)
        for (std::size_t j = i + 1; j < cs.reps.size(); ++j) {
            std::vector<i64> diff(cs.reps[i]);
            for (std::size_t t = 0; t < diff.size(); ++t) diff[t] -= cs.reps[j][t];
            if (lattice_member(cs.B, diff)) return false;
        }
    return true;
}

/// Column-style Hermite normal form: B U = H with U unimodular, H lower
/// triangular with positive diagonal.  Same column span, so B Z^n = H Z^n.
inline IntMatrix hermite_form(const IntMatrix& B) {
    IntMatrix h = B;
    int n = h.n;
    for (int i = 0; i < n; ++i) {
        // gcd-eliminate row i across columns i..n-1
        for (int c = i + 1; c < n; ++c) {
            while (h.at(i, c) != 0) {
                if (h.at(i, i) == 0) {
                    for (int r = 0; r < n; ++r) std::swap(h.at(r, i), h.at(r, c));
                    continue;
                }
                i64 q = floor_div(h.at(i, c), h.at(i, i));
                for (int r = 0; r < n; ++r) h.at(r, c) -= q * h.at(r, i);
                if (h.at(i, c) != 0)
                    for (int r = 0; r < n; ++r) std::swap(h.at(r, i), h.at(r, c));
            }
        }
        if (h.at(i, i) == 0) throw ecs_error("singular matrix has no Hermite form here");
        if (h.at(i, i) < 0)
            for (int r = 0; r < n; ++r) h.at(r, i) = -h.at(r, i);
        // reduce earlier columns so off-diagonal entries sit in [0, h_ii)
        for (int c = 0; c < i; ++c) {
            i64 q = floor_div(h.at(i, c), h.at(i, i));
            if (q != 0)
                for (int r = 0; r < n; ++r) h.at(r, c) -= q * h.at(r, i);
        }
    }
    return h;
}

/// Canonical representative of v + B Z^n: reduce against the Hermite form
/// top-down, leaving coordinate i in [0, H_ii).
inline std::vector<i64> reduce_mod_lattice(const IntMatrix& hnf, std::vector<i64> v) {
    for (int i = 0; i < hnf.n; ++i) {
        i64 q = floor_div(v[static_cast<std::size_t>(i)], hnf.at(i, i));
        if (q != 0)
            for (int r = i; r < hnf.n; ++r) v[static_cast<std::size_t>(r)] -= q * hnf.at(r, i);
    }
    return v;
}

/// The |det B| canonical coset representatives: all vectors in the Hermite
/// fundamental box, enumerated lexicographically.
inline CosetSystem canonical_cosets(const IntMatrix& B) {
    IntMatrix h = hermite_form(B);
    CosetSystem cs;
    cs.B = B;
    std::vector<i64> v(static_cast<std::size_t>(B.n), 0);
    for (;;) {
        cs.reps.push_back(reduce_mod_lattice(h, v));
        int i = B.n - 1;
        while (i >= 0) {
            if (++v[static_cast<std::size_t>(i)] < h.at(i, i)) break;
            v[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    std::sort(cs.reps.begin(), cs.reps.end());
    return cs;
}

// Text formats: rows separated by ';', entries by ','  ("1,-1;0,3");
// vectors are comma lists ("0,1").

inline std::vector<i64> parse_vector(const std::string& text) {
    std::vector<i64> v;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            v.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            throw format_error("bad integer '" + tok + "' in vector '" + text + "'");
        }
    }
    if (v.empty()) throw format_error("empty vector '" + text + "'");
    return v;
}

inline IntMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<i64>> rows;
    std::istringstream in(text);
    std::string row;
    while (std::getline(in, row, ';')) rows.push_back(parse_vector(row));
    int n = static_cast<int>(rows.size());
    IntMatrix m(n);
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != n)
            throw format_error("matrix '" + text + "' is not square");
        for (int c = 0; c < n; ++c) m.at(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return m;
}

inline std::string vector_to_string(const std::vector<i64>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ",";
        out << v[i];
    }
    return out.str();
}

} // namespace thetaforge
