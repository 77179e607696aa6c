#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <thetaforge/expr.hpp>
#include <thetaforge/quadform.hpp>

using namespace thetaforge;

namespace {

std::mt19937_64 rng(77001);

// Brute-force lattice sum over an explicit box, independent of the bound
// derivation in direct_series.
QSeries lattice_sum_brute(const ExtendedQuadForm& f, i64 order, i64 box) {
    QSeries r(order);
    std::vector<i64> v(static_cast<std::size_t>(f.n), -box);
    for (;;) {
        auto [s, e] = f.eval(v);
        if (e < order) r.add_coeff(e, s);
        int i = f.n - 1;
        while (i >= 0) {
            if (++v[static_cast<std::size_t>(i)] <= box) break;
            v[static_cast<std::size_t>(i)] = -box;
            --i;
        }
        if (i < 0) break;
    }
    return r;
}

// Independent reduction oracle: exhaustive unimodular changes of basis with
// small entries, keeping the lexicographically least reduced form found.
std::optional<BinaryForm> reduce_oracle(const BinaryForm& f, i64 bound = 12) {
    std::optional<BinaryForm> best;
    for (i64 p = -bound; p <= bound; ++p)
        for (i64 q = -bound; q <= bound; ++q)
            for (i64 r = -bound; r <= bound; ++r)
                for (i64 s = -bound; s <= bound; ++s) {
                    if (p * s - q * r != 1 && p * s - q * r != -1) continue;
                    i64 a = f.value(p, r);
                    i64 c = f.value(q, s);
                    i64 tb = 2 * (f.a * p * q + f.b() * (p * s + q * r) + f.c * r * s);
                    BinaryForm g(a, tb, c);
                    if (!g.reduced()) continue;
                    if (!best || g < *best) best = g;
                }
    return best;
}

} // namespace

TEST_CASE("eval_form on the hexagonal form and the determinant-11 form") {
    ExtendedQuadForm hex(2);
    hex.gram2 = IntMatrix(2, {2, 1, 1, 2}); // x1^2 + x1 x2 + x2^2
    auto [s, e] = eval_form(hex, {1, 1});
    CHECK(s == 1);
    CHECK(e == 3);

    ExtendedQuadForm f = ExtendedQuadForm::binary(3, 2, 4, 1, 4, 0, 1, 0);
    auto [s0, e0] = eval_form(f, {0, 0});
    CHECK(s0 == 1);
    CHECK(e0 == 0);
    auto [s1, e1] = eval_form(f, {1, 0});
    CHECK(s1 == -1);
    CHECK(e1 == 4);
}

TEST_CASE("direct_series of x^2 is phi(q)") {
    ExtendedQuadForm f(1);
    f.gram2 = IntMatrix(1, {2});
    QSeries s = direct_series(f, 5);
    CHECK(s.to_string() == "1 + 2*q + 2*q^4");
}

TEST_CASE("direct_series of the hexagonal lattice") {
    ExtendedQuadForm hex(2);
    hex.gram2 = IntMatrix(2, {2, 1, 1, 2});
    QSeries s = direct_series(hex, 4);
    CHECK(eq_to_order(s, lattice_sum_brute(hex, 4, 4), 4));
    CHECK(s.coeff(0) == 1);
    CHECK(s.coeff(1) == 6);
    CHECK(s.coeff(2) == 0);
    CHECK(s.coeff(3) == 6);
}

TEST_CASE("hexagonal lattice sum equals its theta-product combination") {
    ExtendedQuadForm hex(2);
    hex.gram2 = IntMatrix(2, {2, 1, 1, 2});
    const i64 order = 120;
    QSeries lhs = direct_series(hex, order);
    QSeries rhs = eval(parse("phi(q)*phi(q^3) + 4*q*psi(q^2)*psi(q^6)"), order);
    CHECK(eq_to_order(lhs, rhs, order));
}

TEST_CASE("direct_series matches brute force on random forms") {
    std::uniform_int_distribution<i64> small(-4, 4);
    int done = 0;
    while (done < 40) {
        ExtendedQuadForm f(2);
        i64 a = 1 + static_cast<i64>(rng() % 6);
        i64 c = 1 + static_cast<i64>(rng() % 6);
        i64 tb = small(rng);
        f.gram2 = IntMatrix(2, {2 * a, tb, tb, 2 * c});
        if (!f.positive_definite()) continue;
        f.lin = {small(rng), small(rng)};
        f.cnst = static_cast<i64>(rng() % 5);
        f.delta = {static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)};
        QSeries s = direct_series(f, 30);
        CHECK(eq_to_order(s, lattice_sum_brute(f, 30, 20), 30));
        // with no linear or constant part the q^0 coefficient counts only X=0
        if (f.lin[0] == 0 && f.lin[1] == 0 && f.cnst == 0) CHECK(s.coeff(0) == 1);
        ++done;
    }
}

TEST_CASE("direct_series rejects indefinite forms") {
    ExtendedQuadForm f(2);
    f.gram2 = IntMatrix(2, {2, 3, 3, 2});
    CHECK_THROWS_AS(direct_series(f, 10), divergence_error);
}

TEST_CASE("binary reduction examples") {
    auto [r1, u1] = reduce_binary(BinaryForm(5, 4, 6));
    CHECK(r1 == BinaryForm(5, 4, 6));
    CHECK(u1 == IntMatrix::identity(2));

    auto [r2, u2] = reduce_binary(BinaryForm(1, 0, 1));
    CHECK(r2 == BinaryForm(1, 0, 1));

    auto [r3, u3] = reduce_binary(BinaryForm(3, 8, 7));
    CHECK(r3.determinant() == 5);
    auto five = enumerate_reduced_primitive(5);
    CHECK(std::find(five.begin(), five.end(), r3) != five.end());
}

TEST_CASE("reduction is equivalent, reduced, idempotent, and witnessed") {
    std::uniform_int_distribution<i64> small(-6, 6);
    int done = 0;
    while (done < 60) {
        i64 a = 1 + static_cast<i64>(rng() % 8);
        i64 c = 1 + static_cast<i64>(rng() % 8);
        i64 b = small(rng);
        BinaryForm f(a, 2 * b, c);
        if (!f.positive_definite()) continue;
        auto [r, u] = reduce_binary(f);
        CHECK(r.reduced());
        CHECK(r.determinant() == f.determinant());
        // witness: U^T Gram(f) U = Gram(r)
        IntMatrix check = matmul(matmul(u.transposed(), f.gram()), u);
        CHECK(check == r.gram());
        i64 du = det(u);
        CHECK((du == 1 || du == -1));
        auto [r2, u2] = reduce_binary(r);
        CHECK(r2 == r);
        // independent oracle agrees up to the sign-of-b ambiguity of
        // improperly equivalent reduced forms
        auto oracle = reduce_oracle(f);
        REQUIRE(oracle.has_value());
        bool same = (*oracle == r) || (oracle->a == r.a && oracle->c == r.c &&
                                       oracle->two_b == -r.two_b);
        CHECK(same);
        ++done;
    }
}

TEST_CASE("reduced primitive forms of small determinant") {
    auto d11 = enumerate_reduced_primitive(11);
    REQUIRE(d11.size() == 3);
    CHECK(d11[0] == BinaryForm(1, 0, 11));
    CHECK(d11[1] == BinaryForm(3, -2, 4));
    CHECK(d11[2] == BinaryForm(3, 2, 4));

    auto d26 = enumerate_reduced_primitive(26);
    REQUIRE(d26.size() == 6);
    CHECK(d26[0] == BinaryForm(1, 0, 26));
    CHECK(d26[1] == BinaryForm(2, 0, 13));
    CHECK(d26[2] == BinaryForm(3, -2, 9));
    CHECK(d26[3] == BinaryForm(3, 2, 9));
    CHECK(d26[4] == BinaryForm(5, -4, 6));
    CHECK(d26[5] == BinaryForm(5, 4, 6));

    CHECK(enumerate_reduced_primitive(1) == std::vector<BinaryForm>{BinaryForm(1, 0, 1)});
}

TEST_CASE("class enumeration matches a wide brute-force scan") {
    for (i64 D = 1; D <= 100; ++D) {
        auto fast = enumerate_reduced_primitive(D);
        std::vector<BinaryForm> slow;
        for (i64 a = 1; a <= D + 1; ++a)
            for (i64 c = a; c <= D + 1; ++c)
                for (i64 b = -a; b <= a; b += 1) {
                    if (a * c - b * b != D) continue;
                    if (2 * (b < 0 ? -b : b) > a) continue;
                    if (gcd64(gcd64(a, 2 * b), c) != 1) continue;
                    slow.emplace_back(a, 2 * b, c);
                }
        std::sort(slow.begin(), slow.end());
        CHECK(fast == slow);
    }
}

TEST_CASE("representations of integers by binary forms") {
    BinaryForm f(1, 0, 6);
    auto r10 = represent(f, 10);
    CHECK(r10 == std::vector<std::pair<i64, i64>>{{-2, -1}, {-2, 1}, {2, -1}, {2, 1}});
    auto r15 = represent(f, 15);
    CHECK(r15 == std::vector<std::pair<i64, i64>>{{-3, -1}, {-3, 1}, {3, -1}, {3, 1}});
    BinaryForm g(3, 2, 4);
    auto r3 = represent(g, 3);
    CHECK(r3 == std::vector<std::pair<i64, i64>>{{-1, 0}, {1, 0}});
    CHECK(represent(f, 0) == std::vector<std::pair<i64, i64>>{{0, 0}});
}

TEST_CASE("congruence diagonalizers cited in the proofs") {
    // diag(1,6), target (10,15)
    IntMatrix g1(2, {2, 0, 0, 12});
    auto ms = find_congruence_matrices(g1, {10, 15}, default_entry_bound(g1, {10, 15}));
    CHECK(std::find(ms.begin(), ms.end(), IntMatrix(2, {2, 3, -1, 1})) != ms.end());

    IntMatrix g2(2, {6, 2, 2, 8}); // Gram [[3,1],[1,4]]
    auto m1 = find_congruence_matrices(g2, {3, 33}, default_entry_bound(g2, {3, 33}));
    CHECK(std::find(m1.begin(), m1.end(), IntMatrix(2, {1, -1, 0, 3})) != m1.end());
    auto m2 = find_congruence_matrices(g2, {5, 55}, default_entry_bound(g2, {5, 55}));
    CHECK(std::find(m2.begin(), m2.end(), IntMatrix(2, {1, 3, -1, 2})) != m2.end());

    // nothing represents 2 in x^2 + 6y^2
    auto none = find_congruence_matrices(g1, {2, 3}, 5);
    CHECK(none.empty());
}

TEST_CASE("every returned diagonalizer verifies exactly") {
    std::vector<std::pair<IntMatrix, std::vector<i64>>> cases = {
        {IntMatrix(2, {2, 0, 0, 12}), {10, 15}},
        {IntMatrix(2, {6, 2, 2, 8}), {3, 33}},
        {IntMatrix(2, {6, 2, 2, 8}), {5, 55}},
        {IntMatrix(2, {10, 2, 2, 16}), {15, 65}},
        {IntMatrix(2, {10, 2, 2, 16}), {5, 195}},
    };
    for (const auto& [g, target] : cases) {
        auto ms = find_congruence_matrices(g, target, default_entry_bound(g, target));
        CHECK(!ms.empty());
        for (const auto& b : ms) {
            IntMatrix prod = matmul(matmul(b.transposed(), g), b);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    CHECK(prod.at(i, j) == (i == j ? 2 * target[static_cast<std::size_t>(i)] : 0));
        }
    }
}

TEST_CASE("search is complete against an exhaustive box scan") {
    std::vector<std::pair<IntMatrix, std::vector<i64>>> cases = {
        {IntMatrix(2, {2, 0, 0, 12}), {10, 15}},
        {IntMatrix(2, {6, 2, 2, 8}), {3, 33}},
        {IntMatrix(2, {4, 2, 2, 6}), {3, 15}},
        {IntMatrix(2, {2, 1, 1, 2}), {2, 6}},
    };
    for (const auto& [g, target] : cases) {
        const i64 bound = 5;
        auto fast = find_congruence_matrices(g, target, bound);
        std::set<IntMatrix> slow;
        for (i64 a = -bound; a <= bound; ++a)
            for (i64 b = -bound; b <= bound; ++b)
                for (i64 c = -bound; c <= bound; ++c)
                    for (i64 d = -bound; d <= bound; ++d) {
                        IntMatrix m(2, {a, b, c, d});
                        if (det(m) == 0) continue;
                        IntMatrix prod = matmul(matmul(m.transposed(), g), m);
                        if (prod.at(0, 1) != 0 || prod.at(1, 0) != 0) continue;
                        if (prod.at(0, 0) != 2 * target[0] || prod.at(1, 1) != 2 * target[1])
                            continue;
                        slow.insert(detail::canonicalize_columns(m));
                    }
        CHECK(fast == std::vector<IntMatrix>(slow.begin(), slow.end()));
    }
}

TEST_CASE("form text round trip") {
    ExtendedQuadForm f = parse_form("quad: 3,2,4 | lin: 1,4 | const: 0 | delta: 1,0");
    CHECK(f.n == 2);
    CHECK(f.gram2 == IntMatrix(2, {6, 2, 2, 8}));
    CHECK(f.lin == std::vector<i64>{1, 4});
    CHECK(f.delta == std::vector<int>{1, 0});
    CHECK(parse_form(form_to_string(f)).gram2 == f.gram2);

    ExtendedQuadForm t = parse_form("gram2: 2,0,1;0,2,1;1,1,4 | lin: 0,0,0 | const: 0 | delta: 0,0,0");
    CHECK(t.n == 3);
    CHECK(t.quad_value({1, 1, 1}) == 6); // x1^2+x2^2+2x3^2+x1x3+x2x3 at (1,1,1)
    CHECK_THROWS_AS(parse_form("lin: 1,2"), format_error);
}
