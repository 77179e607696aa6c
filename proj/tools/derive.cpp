// Derivation search: given a statement lhs/rhs and a quadratic part, sweep
// linear parts and sign characters looking for coset expansions that
// reproduce each side.  Used to pin down the derivation blocks of corpus
// records when a sketch omits (or garbles) the linear data.

#include <CLI11.hpp>

#include <cstdio>
#include <thetaforge/scan.hpp>

using namespace thetaforge;

namespace {

std::optional<ThetaCombination> side_combination(const ExprPtr& e, i64 scale) {
    try {
        return scale_combination(expr_to_combination(*e), scale);
    } catch (const error&) {
        return std::nullopt; // quotient side; fall back to series matching
    }
}

QSeries side_series(const ExprPtr& e, i64 order, i64 scale) {
    QSeries s = eval(e, (order + scale - 1) / scale + 1);
    if (scale > 1) s = s.substitute_power(scale);
    return s.truncated(order);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"search for coset-expansion derivations of a theta identity"};
    std::string quad, gram2, lhs_text, rhs_text;
    i64 scale = 1, box = 10, order = 80, max_det_b = 6;
    app.add_option("--quad", quad, "binary quadratic part a,2b,c");
    app.add_option("--gram2", gram2, "doubled Gram matrix rows");
    app.add_option("--lhs", lhs_text, "statement left side")->required();
    app.add_option("--rhs", rhs_text, "statement right side")->required();
    app.add_option("--scale", scale, "statement variable is q, sums live in q^scale");
    app.add_option("--box", box, "linear coefficient sweep bound");
    app.add_option("--order", order, "comparison order");
    app.add_option("--max-det-b", max_det_b, "diagonalizer determinant bound");
    CLI11_PARSE(app, argc, argv);

    try {
        ExtendedQuadForm base;
        if (!quad.empty())
            base = parse_form("quad: " + quad);
        else if (!gram2.empty())
            base = parse_form("gram2: " + gram2);
        else {
            std::fprintf(stderr, "need --quad or --gram2\n");
            return 2;
        }
        ExprPtr lhs_expr = parse(lhs_text), rhs_expr = parse(rhs_text);
        auto lhs_comb = side_combination(lhs_expr, scale);
        auto rhs_comb = side_combination(rhs_expr, scale);
        QSeries lhs = side_series(lhs_expr, order, scale);
        QSeries rhs = side_series(rhs_expr, order, scale);

        ScanOptions opts;
        opts.max_det_b = max_det_b;
        std::vector<Diagonalizer> diags;
        if (base.n == 2) {
            BinaryForm f(base.gram2.at(0, 0) / 2, base.gram2.at(0, 1), base.gram2.at(1, 1) / 2);
            diags = detail::collect_diagonalizers(f, opts);
        } else {
            std::fprintf(stderr, "only binary forms are searched automatically\n");
            return 2;
        }
        std::printf("%zu diagonalizers\n", diags.size());

        for (i64 d1 = -box; d1 <= box; ++d1)
            for (i64 d2 = -box; d2 <= box; ++d2)
                for (int delta = 0; delta < 4; ++delta) {
                    ExtendedQuadForm F = base;
                    F.lin = {d1, d2};
                    F.delta = {delta >> 1, delta & 1};
                    for (const auto& dg : diags) {
                        ThetaCombination comb;
                        try {
                            comb = expand(F, dg.cs, 40);
                        } catch (const error&) {
                            continue;
                        }
                        const char* side = nullptr;
                        if (lhs_comb && combinations_match(comb, *lhs_comb))
                            side = "lhs";
                        else if (rhs_comb && combinations_match(comb, *rhs_comb))
                            side = "rhs";
                        else if (!lhs_comb &&
                                 detail::monomial_ratio_match(comb.series(order), lhs))
                            side = "lhs?";
                        else if (!rhs_comb &&
                                 detail::monomial_ratio_match(comb.series(order), rhs))
                            side = "rhs?";
                        if (side)
                            std::printf("%s <- lin %lld,%lld delta %d,%d  B %s  targets %s  [%s]\n",
                                        side, static_cast<long long>(d1),
                                        static_cast<long long>(d2), delta >> 1, delta & 1,
                                        dg.B.to_string().c_str(),
                                        vector_to_string(dg.target).c_str(),
                                        to_string(comb).c_str());
                    }
                }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
