// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code (series comparisons are exact; orders as stated per criterion).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <thetaforge/corpus.hpp>
#include <thetaforge/scan.hpp>

using namespace thetaforge;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", num, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

std::string run_cli(const std::string& args, int& exit_code) {
    std::string cmd = std::string(TF_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        exit_code = -1;
        return "";
    }
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    int status = pclose(pipe);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

// --- criterion 1: full corpus at order 300 ---------------------------------

void criterion1() {
    auto start = std::chrono::steady_clock::now();
    std::vector<IdentityRecord> recs = load_corpus(TF_CORPUS_DIR);
    auto reports = verify_all(recs, 300);
    bool ok = recs.size() >= 46;
    std::string bad;
    for (const auto& rep : reports)
        if (!rep.ok) {
            ok = false;
            bad += rep.id + " ";
        }
    i64 ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - start)
                 .count();
    report(1, "corpus verification at order 300", ok,
           std::to_string(recs.size()) + " records in " + std::to_string(ms) + " ms" +
               (bad.empty() ? "" : "; failed: " + bad));
}

// --- criterion 2: the determinant-11 pipeline at order 400 -----------------

void criterion2() {
    const i64 order = 400;
    ExtendedQuadForm f = ExtendedQuadForm::binary(3, 2, 4, 1, 4, 0, 1, 0);
    QSeries direct = direct_series(f, order);

    CosetSystem cs1 = CosetSystem::along_axis(IntMatrix(2, {1, -1, 0, 3}), 2, -1, 1);
    CosetSystem cs2 = CosetSystem::along_axis(IntMatrix(2, {1, 3, -1, 2}), 1, -2, 2);
    ThetaCombination e1 = expand(f, cs1, order);
    ThetaCombination e2 = expand(f, cs2, order);

    bool ok = eq_to_order(e1.series(order), direct, order) &&
              eq_to_order(e2.series(order), direct, order);
    ok = ok && to_string(e1) == "2*f(-q^2)*f(-q^22)";
    ok = ok && combinations_match(e2, expr_to_combination(*parse(
                                          "2*f(-q^2,-q^8)*f(-q^44,-q^66)"
                                          " - 2*q^4*f(-q^4,-q^6)*f(-q^22,-q^88)")));
    QSeries one = eval(parse("G(q^11)*H(q) - q^2*G(q)*H(q^11)"), order);
    ok = ok && eq_to_order(one, QSeries::one(order), order);
    report(2, "determinant-11 pipeline at order 400", ok);
}

// --- criterion 3: the classical two-variable example at order 300 ----------

void criterion3() {
    const i64 order = 300;
    ExtendedQuadForm hex(2);
    hex.gram2 = IntMatrix(2, {2, 1, 1, 2});
    QSeries lhs = direct_series(hex, order);
    QSeries rhs = eval(parse("phi(q)*phi(q^3) + 4*q*psi(q^2)*psi(q^6)"), order);
    report(3, "x1^2+x1x2+x2^2 equals its theta combination at order 300",
           eq_to_order(lhs, rhs, order));
}

// --- criterion 4: Rogers-Ramanujan sums vs products at order 200 -----------

QSeries rr_sum_oracle(bool g, i64 order, int nmax = 30) {
    QSeries total(order);
    for (int n = 0; n <= nmax; ++n) {
        i64 top = g ? i64(n) * n : i64(n) * (n + 1);
        if (top >= order) break;
        QSeries den = QSeries::one(order);
        for (int k = 1; k <= n; ++k) {
            QSeries fk = QSeries::one(order);
            fk.add_coeff(k, -1);
            den = mul(den, fk);
        }
        total = add(total, invert_unit(den).shifted(top).truncated(order));
    }
    return total;
}

void criterion4() {
    const i64 order = 200;
    MonomialArg q5 = MonomialArg::q(5);
    QSeries g_prod = invert_unit(mul(pochhammer_inf(MonomialArg::q(1), q5, order),
                                     pochhammer_inf(MonomialArg::q(4), q5, order))
                                     .truncated(order));
    QSeries h_prod = invert_unit(mul(pochhammer_inf(MonomialArg::q(2), q5, order),
                                     pochhammer_inf(MonomialArg::q(3), q5, order))
                                     .truncated(order));
    bool ok = eq_to_order(rr_sum_oracle(true, order), g_prod, order) &&
              eq_to_order(rr_sum_oracle(false, order), h_prod, order) &&
              eq_to_order(eval(parse("G(q)"), order), g_prod, order) &&
              eq_to_order(eval(parse("H(q)"), order), h_prod, order);
    report(4, "Rogers-Ramanujan sum forms equal product forms at order 200", ok);
}

// --- criterion 5: structural property suites -------------------------------

void criterion5() {
    bool ok = true;
    // Jacobi triple product, exponent sums <= 8, order 150
    for (int sa : {1, -1})
        for (int sb : {1, -1})
            for (i64 ea = 0; ea <= 8 && ok; ++ea)
                for (i64 eb = std::max<i64>(1 - ea, 0); ea + eb <= 8 && ok; ++eb) {
                    MonomialArg a{sa, ea}, b{sb, eb};
                    MonomialArg ab = a * b;
                    QSeries lhs = theta_series(a, b, 150);
                    QSeries rhs = mul(mul(pochhammer_inf(a.negated(), ab, 150),
                                          pochhammer_inf(b.negated(), ab, 150)),
                                      pochhammer_inf(ab, ab, 150));
                    ok = ok && eq_to_order(lhs, rhs.truncated(150), 150);
                    // symmetry at the same time
                    ok = ok && eq_to_order(lhs, theta_series(b, a, 150), 150);
                }
    // quintuple product, 1 <= alpha, beta <= 5, order 150
    for (i64 alpha = 1; alpha <= 5 && ok; ++alpha)
        for (i64 beta = 1; beta <= 5 && ok; ++beta) {
            MonomialArg x = MonomialArg::neg_q(alpha), l = MonomialArg::neg_q(beta);
            QSeries num = mul(theta_series(x.pow(2).negated(), (l * x).negated(), 150),
                              euler_series((l * x.pow(3)).negated(), 150));
            QSeries den = theta_series(x.negated(), (l * x.pow(2)).negated(), 150);
            QSeries lhs = mul(num, den.inverted());
            QSeries rhs = theta_series((l.pow(2) * x.pow(3)).negated(),
                                       (l * x.pow(6)).negated(), 150);
            QSeries xterm =
                theta_series(l.negated(), (l.pow(2) * x.pow(9)).negated(), 150 - alpha)
                    .shifted(alpha)
                    .scaled(-1); // x = -q^alpha
            rhs = add(rhs, xterm.truncated(150));
            i64 n = std::min<i64>(150, lhs.order());
            ok = ok && eq_to_order(lhs.truncated(n), rhs.truncated(n), n);
        }
    // dissection reassembly, k <= 5
    for (i64 k = 1; k <= 5 && ok; ++k)
        for (int s : {1, -1})
            for (i64 ea = 0; ea <= 3 && ok; ++ea)
                for (i64 eb = std::max<i64>(1 - ea, 0); eb <= 3 && ok; ++eb) {
                    MonomialArg a{s, ea}, b{s, eb};
                    QSeries total(120);
                    for (const auto& t : dissect_theta(a, b, k))
                        total = add(total, theta_series(t.arg1, t.arg2, 120 - t.prefactor.exp)
                                               .shifted(t.prefactor.exp)
                                               .scaled(t.prefactor.sign)
                                               .truncated(120));
                    ok = ok && eq_to_order(total, theta_series(a, b, 120), 120);
                }
    // f(-1, a) = 0 and f(1, a) = 2 f(a, a^3)
    for (i64 e = 1; e <= 8 && ok; ++e)
        for (int s : {1, -1}) {
            MonomialArg a{s, e};
            ok = ok && theta_series(MonomialArg::minus_one(), a, 200).is_zero();
            ok = ok && eq_to_order(theta_series(MonomialArg::one(), a, 200),
                                   theta_series(a, a.pow(3), 200).scaled(2), 200);
        }
    report(5, "triple/quintuple product, dissection, unit-argument laws", ok);
}

// --- criterion 6: covering criterion vs brute force -------------------------

bool brute_force_cover(const CosetSystem& cs, i64 box) {
    std::vector<i64> v(2, -box);
    for (;;) {
        int hits = 0;
        for (const auto& r : cs.reps) {
            std::vector<i64> diff{v[0] - r[0], v[1] - r[1]};
            if (lattice_member(cs.B, diff)) ++hits;
        }
        if (hits != 1) return false;
        int i = 1;
        while (i >= 0) {
            if (++v[static_cast<std::size_t>(i)] <= box) break;
            v[static_cast<std::size_t>(i)] = -box;
            --i;
        }
        if (i < 0) break;
    }
    return true;
}

void criterion6() {
    bool ok = true;
    for (i64 a = -3; a <= 3 && ok; ++a)
        for (i64 b = -3; b <= 3 && ok; ++b)
            for (i64 c = -3; c <= 3 && ok; ++c)
                for (i64 d = -3; d <= 3 && ok; ++d) {
                    IntMatrix m(2, {a, b, c, d});
                    i64 dd = det(m);
                    i64 k = dd < 0 ? -dd : dd;
                    if (k < 1 || k > 6) continue;
                    bool axis_works = false;
                    for (int j = 1; j <= 2 && !axis_works; ++j) {
                        CosetSystem cs = CosetSystem::along_axis(m, j, 0, k - 1);
                        if (verify_ecs(cs) && brute_force_cover(cs, 8)) axis_works = true;
                    }
                    ok = is_simple_covering(m).has_value() == axis_works;
                }
    report(6, "simple-covering criterion equals brute force on [-8,8]^2", ok);
}

// --- criterion 7: reduced-form enumeration through the CLI -----------------

void criterion7() {
    int code = 0;
    std::string out11 = run_cli("reduce-forms --det 11", code);
    bool ok = code == 0 && out11 == "(1, 0, 11)\n(3, -2, 4)\n(3, 2, 4)\n";
    std::string out26 = run_cli("reduce-forms --det 26", code);
    ok = ok && code == 0 &&
         out26 == "(1, 0, 26)\n(2, 0, 13)\n(3, -2, 9)\n(3, 2, 9)\n(5, -4, 6)\n(5, 4, 6)\n";
    report(7, "reduce-forms ground truth for determinants 11 and 26", ok);
}

// --- criterion 8: cited congruence diagonalizers through the CLI -----------

void criterion8() {
    struct Triple {
        const char* gram;
        const char* target;
        const char* expect;
    };
    // For the Gram matrix [[5,1],[1,8]] the targets pair with the matrices as
    // B^T G B actually evaluates: (15,65) -> [[1,-3],[1,2]] and
    // (5,195) -> [[1,-1],[0,5]].
    std::vector<Triple> triples = {
        {"1,0;0,6", "10,15", "2,3;-1,1"},   {"3,1;1,4", "3,33", "1,-1;0,3"},
        {"3,1;1,4", "5,55", "1,3;-1,2"},    {"5,1;1,8", "15,65", "1,-3;1,2"},
        {"5,1;1,8", "5,195", "1,-1;0,5"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& t : triples) {
        int code = 0;
        std::string out = run_cli(std::string("find-matrix --gram \"") + t.gram +
                                      "\" --target \"" + t.target + "\"",
                                  code);
        bool hit = code == 0 && out.find(std::string(t.expect) + "\n") != std::string::npos;
        if (!hit) {
            ok = false;
            detail += std::string(t.gram) + "->" + t.target + " ";
        }
        // every reported matrix re-multiplies exactly
        IntMatrix g = parse_matrix(t.gram);
        for (auto& x : g.e) x *= 2;
        std::vector<i64> target = parse_vector(t.target);
        std::istringstream lines(out);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.empty()) continue;
            IntMatrix b = parse_matrix(line);
            IntMatrix prod = matmul(matmul(b.transposed(), g), b);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (prod.at(i, j) != (i == j ? 2 * target[static_cast<std::size_t>(i)] : 0))
                        ok = false;
        }
    }
    report(8, "find-matrix reproduces the cited diagonalizers", ok, detail);
}

// --- criterion 9: scan rediscovery at determinant 11 ------------------------

void criterion9() {
    ScanOptions opts;
    opts.max_det = 11;
    opts.order = 100;
    auto start = std::chrono::steady_clock::now();
    std::vector<ScanResult> results = scan(opts);
    i64 ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - start)
                 .count();
    bool ok = false;
    int skeleton_holders = 0;
    for (const auto& res : results) {
        if (res.determinant != 11) continue;
        // a candidate is the simplest-identity skeleton when one side merges
        // to a single product and the other to two, from dets {3, 5}
        bool holds = false;
        for (const auto& c : res.candidates) {
            if (!c.verified) continue;
            i64 d1 = det(res.diagonalizers[c.d1].B);
            i64 d2 = det(res.diagonalizers[c.d2].B);
            d1 = d1 < 0 ? -d1 : d1;
            d2 = d2 < 0 ? -d2 : d2;
            if (std::min(d1, d2) != 3 || std::max(d1, d2) != 5) continue;
            ThetaCombination l = canonical_combination(expr_to_combination(*parse(c.lhs)));
            ThetaCombination r = canonical_combination(expr_to_combination(*parse(c.rhs)));
            if (std::min(l.terms.size(), r.terms.size()) != 1 ||
                std::max(l.terms.size(), r.terms.size()) != 2)
                continue;
            // series-equal to the known skeleton
            QSeries want = eval(parse("2*f(-q^2)*f(-q^22)"), opts.order);
            QSeries got = eval(parse(c.lhs), opts.order);
            i64 n = std::min({opts.order, want.order(), got.order()});
            if (n < 50 || !eq_to_order(got.truncated(n), want.truncated(n), n)) continue;
            holds = true;
        }
        if (holds) {
            ++skeleton_holders;
            if (res.form == BinaryForm(3, 2, 4)) ok = true;
        }
    }
    ok = ok && skeleton_holders == 1; // only (3,2,4) produces the pattern
    report(9, "scan rediscovers the determinant-11 skeleton uniquely", ok,
           std::to_string(ms) + " ms");
}

} // namespace

int main() {
    void (*criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                            criterion6, criterion7, criterion8, criterion9};
    for (int i = 0; i < 9; ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(i + 1, "unexpected error", false, e.what());
        }
    }
    if (failures == 0)
        std::printf("all 9 acceptance criteria pass\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
