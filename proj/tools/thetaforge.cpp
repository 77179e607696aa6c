// Command-line surface: series evaluation, corpus verification, coset
// expansion, congruence-matrix search, form enumeration, ECS checks, and the
// determinant-sweep discovery scan.
//
// Exit codes: 0 success / verified true, 1 verified false, 2 usage or
// evaluation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <thetaforge/corpus.hpp>
#include <thetaforge/scan.hpp>

using namespace thetaforge;
using nlohmann::json;

namespace {

i64 default_order(i64 fallback) {
    if (const char* env = std::getenv("THETAFORGE_ORDER")) {
        try {
            return std::stoll(env);
        } catch (const std::exception&) {
            throw format_error("THETAFORGE_ORDER is not an integer");
        }
    }
    return fallback;
}

std::string default_corpus_dir() {
#ifdef TF_CORPUS_DIR
    return TF_CORPUS_DIR;
#else
    return "corpus";
#endif
}

int cmd_series(const std::string& text, i64 order) {
    QSeries s = eval(parse(text), order);
    if (s.min_exp() < 0)
        std::printf("# lowest exponent %lld\n", static_cast<long long>(s.min_exp()));
    i64 lo = std::min<i64>(0, s.min_exp());
    for (i64 e = lo; e < order; ++e) {
        if (e > lo) std::printf(", ");
        std::printf("%s", s.coeff(e).str().c_str());
    }
    std::printf("\n");
    return 0;
}

int cmd_verify(const std::vector<std::string>& ids, bool all, i64 order, bool as_json,
               bool with_derivation, const std::string& dir) {
    std::vector<IdentityRecord> recs = load_corpus(dir);
    if (!all) {
        std::vector<IdentityRecord> picked;
        for (const auto& want : ids) {
            bool found = false;
            for (const auto& r : recs)
                if (r.id == want) {
                    picked.push_back(r);
                    found = true;
                }
            if (!found) throw format_error("no corpus record with id '" + want + "'");
        }
        recs = std::move(picked);
    }
    std::vector<VerifyReport> reports = verify_all(recs, order);
    bool all_ok = true;
    json out = json::array();
    for (const auto& rep : reports) {
        all_ok = all_ok && rep.ok;
        if (as_json) {
            json j{{"id", rep.id}, {"ok", rep.ok}, {"elapsed_ms", rep.elapsed_ms}};
            j["first_mismatch"] =
                rep.first_bad_exponent ? json(*rep.first_bad_exponent) : json(nullptr);
            if (!rep.error.empty()) j["error"] = rep.error;
            out.push_back(j);
        } else {
            std::printf("%-12s %s (%lld ms)", rep.id.c_str(), rep.ok ? "ok" : "FAIL",
                        static_cast<long long>(rep.elapsed_ms));
            if (rep.first_bad_exponent)
                std::printf("  first mismatch at q^%lld",
                            static_cast<long long>(*rep.first_bad_exponent));
            if (!rep.error.empty()) std::printf("  %s", rep.error.c_str());
            std::printf("\n");
        }
    }
    if (with_derivation) {
        for (const auto& r : recs) {
            if (!r.has_derivation()) continue;
            DerivationReport rep = verify_derivation(r, order);
            all_ok = all_ok && rep.ok;
            if (as_json) {
                out.push_back(json{{"id", rep.id + ".derivation"},
                                   {"ok", rep.ok},
                                   {"elapsed_ms", rep.elapsed_ms},
                                   {"stage", rep.failed_stage}});
            } else {
                std::printf("%-12s derivation %s (%lld ms)%s%s\n", rep.id.c_str(),
                            rep.ok ? "ok" : "FAIL", static_cast<long long>(rep.elapsed_ms),
                            rep.ok ? "" : "  stage: ", rep.failed_stage.c_str());
            }
        }
    }
    if (as_json) std::printf("%s\n", out.dump(2).c_str());
    return all_ok ? 0 : 1;
}

int cmd_expand(const std::string& form_text, const std::string& matrix_text,
               const std::string& shifts_text, i64 order) {
    ExtendedQuadForm f = parse_form(form_text);
    CosetSystem cs = detail::parse_coset_line(matrix_text + " | shifts: " + shifts_text);
    ThetaCombination comb = expand(f, cs, order);
    std::printf("%s\n", to_string(comb).c_str());
    return 0;
}

int cmd_find_matrix(const std::string& gram_text, bool doubled, const std::string& target_text,
                    i64 bound) {
    IntMatrix g = parse_matrix(gram_text);
    if (!doubled)
        for (auto& x : g.e) x *= 2;
    std::vector<i64> target = parse_vector(target_text);
    if (bound <= 0) bound = default_entry_bound(g, target);
    auto found = find_congruence_matrices(g, target, bound);
    for (const auto& b : found) std::printf("%s\n", b.to_string().c_str());
    return found.empty() ? 1 : 0;
}

int cmd_reduce_forms(i64 d) {
    for (const auto& f : enumerate_reduced_primitive(d)) std::printf("%s\n", f.to_string().c_str());
    return 0;
}

int cmd_check_ecs(const std::string& matrix_text, const std::string& reps_text) {
    CosetSystem cs = detail::parse_coset_line(matrix_text + " | shifts: " + reps_text);
    bool ok = verify_ecs(cs);
    std::printf("%s\n", ok ? "exact cover" : "not an exact cover");
    return ok ? 0 : 1;
}

int cmd_scan(i64 max_det, i64 order, i64 max_det_b, i64 lin_box, const std::string& out_file) {
    ScanOptions opts;
    opts.max_det = max_det;
    opts.order = order;
    opts.max_det_b = max_det_b;
    opts.lin_box = lin_box;
    std::vector<ScanResult> results = scan(opts);
    std::ofstream records;
    if (!out_file.empty()) records.open(out_file);
    for (const auto& res : results) {
        std::set<i64> dets;
        for (const auto& dg : res.diagonalizers) {
            i64 d = det(dg.B);
            dets.insert(d < 0 ? -d : d);
        }
        std::string det_list;
        for (i64 d : dets) det_list += (det_list.empty() ? "" : ",") + std::to_string(d);
        std::printf("D=%lld form %s: %zu diagonalizers (|det B| in {%s}), %zu verified pairs\n",
                    static_cast<long long>(res.determinant), res.form.to_string().c_str(),
                    res.diagonalizers.size(), det_list.c_str(), res.candidates.size());
        int index = 0;
        for (const auto& c : res.candidates) {
            if (records.is_open()) records << candidate_to_record(res, c, index) << "\n";
            ++index;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact q-series engine for theta-function product identities"};
    app.require_subcommand(1);

    auto* series = app.add_subcommand("series", "evaluate an expression to a coefficient list");
    std::string series_expr;
    i64 series_order = 32;
    series->add_option("expr", series_expr, "expression text")->required();
    series->add_option("--order", series_order, "truncation order");

    auto* verify = app.add_subcommand("verify", "verify corpus identities");
    std::vector<std::string> verify_ids;
    bool verify_all_flag = false, verify_json = false, verify_derive = false;
    i64 verify_order = 0;
    std::string corpus_dir = default_corpus_dir();
    verify->add_option("ids", verify_ids, "record ids to verify");
    verify->add_flag("--all", verify_all_flag, "verify every record");
    verify->add_option("--order", verify_order, "series order (default 300)");
    verify->add_flag("--json", verify_json, "machine-readable report");
    verify->add_flag("--derivation", verify_derive, "also check stored derivations");
    verify->add_option("--corpus", corpus_dir, "corpus directory");

    auto* expand_cmd = app.add_subcommand("expand", "expand a form along a coset system");
    std::string expand_form, expand_matrix, expand_shifts;
    i64 expand_order = 0;
    expand_cmd->add_option("--form", expand_form, "extended quadratic form")->required();
    expand_cmd->add_option("--matrix", expand_matrix, "covering matrix rows")->required();
    expand_cmd->add_option("--shifts", expand_shifts, "e<j>, lo..hi or (v1),(v2),...")->required();
    expand_cmd->add_option("--order", expand_order, "numeric check order (0 = automatic)");

    auto* find = app.add_subcommand("find-matrix", "solve B^T G B = diag(target)");
    std::string find_gram, find_target;
    bool find_doubled = false;
    i64 find_bound = 0;
    find->add_option("--gram", find_gram, "Gram matrix rows (integer entries)")->required();
    find->add_flag("--doubled", find_doubled, "treat --gram as the doubled matrix 2G");
    find->add_option("--target", find_target, "diagonal target values")->required();
    find->add_option("--bound", find_bound, "entry bound (0 = derived default)");

    auto* reduce = app.add_subcommand("reduce-forms", "list reduced primitive forms");
    i64 reduce_det = 0;
    reduce->add_option("--det", reduce_det, "determinant ac - b^2")->required();

    auto* check = app.add_subcommand("check-ecs", "check a coset system for exact cover");
    std::string check_matrix, check_reps;
    check->add_option("--matrix", check_matrix, "covering matrix rows")->required();
    check->add_option("--reps", check_reps, "e<j>, lo..hi or (v1),(v2),...")->required();

    auto* scan_cmd = app.add_subcommand("scan", "determinant sweep for new identities");
    i64 scan_max_det = 11, scan_order = 0, scan_max_det_b = 5, scan_lin_box = -1;
    std::string scan_out;
    scan_cmd->add_option("--max-det", scan_max_det, "largest form determinant");
    scan_cmd->add_option("--order", scan_order, "verification order (default 100)");
    scan_cmd->add_option("--max-det-b", scan_max_det_b, "largest |det B|");
    scan_cmd->add_option("--lin-box", scan_lin_box, "linear sweep bound (-1 = default)");
    scan_cmd->add_option("--out", scan_out, "write verified pairs as corpus records");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (series->parsed()) return cmd_series(series_expr, default_order(series_order));
        if (verify->parsed()) {
            if (!verify_all_flag && verify_ids.empty())
                throw format_error("verify needs record ids or --all");
            i64 order = verify_order > 0 ? verify_order : default_order(300);
            return cmd_verify(verify_ids, verify_all_flag, order, verify_json, verify_derive,
                              corpus_dir);
        }
        if (expand_cmd->parsed())
            return cmd_expand(expand_form, expand_matrix, expand_shifts, expand_order);
        if (find->parsed()) return cmd_find_matrix(find_gram, find_doubled, find_target, find_bound);
        if (reduce->parsed()) return cmd_reduce_forms(reduce_det);
        if (check->parsed()) return cmd_check_ecs(check_matrix, check_reps);
        if (scan_cmd->parsed()) {
            i64 order = scan_order > 0 ? scan_order : default_order(100);
            return cmd_scan(scan_max_det, order, scan_max_det_b, scan_lin_box, scan_out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
