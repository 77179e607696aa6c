#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "expand.hpp"
#include "quadform.hpp"

namespace thetaforge {

/// Determinant-sweep discovery: for each reduced primitive binary form,
/// collect integral congruence diagonalizers, sweep linear parts and sign
/// characters over a small box, expand along every diagonalizer, and keep
/// the pairs of structurally different expansions.  Every emitted pair is a
/// verified theta-product identity (both sides expand the same lattice sum).
struct ScanOptions {
    i64 max_det = 11;
    i64 max_det_b = 5; // |det B| sweep bound for diagonalizers
    i64 order = 100;   // series order used to verify candidate pairs
    i64 lin_box = -1;  // |d_i| bound; -1 means 2 * max diagonal coefficient
    bool include_mirrors = false; // also scan (a,-2b,c) mirror classes
};

struct Diagonalizer {
    IntMatrix B;
    std::vector<i64> target; // B^T G B = diag(target)
    CosetSystem cs;
};

struct CandidateIdentity {
    ExtendedQuadForm form; // quadratic part + swept linear part and character
    std::size_t d1 = 0, d2 = 0; // indices into ScanResult::diagonalizers
    std::string lhs, rhs;       // rendered combinations
    bool verified = false;
};

struct ScanResult {
    i64 determinant = 0;
    BinaryForm form;
    std::vector<Diagonalizer> diagonalizers;
    std::vector<CandidateIdentity> candidates;
};

namespace detail {

inline std::vector<std::pair<i64, i64>> divisor_pairs(i64 n) {
    std::vector<std::pair<i64, i64>> out;
    for (i64 t = 1; t * t <= n; ++t)
        if (n % t == 0) out.emplace_back(t, n / t);
    return out;
}

inline std::vector<Diagonalizer> collect_diagonalizers(const BinaryForm& f,
                                                       const ScanOptions& opts) {
    std::vector<Diagonalizer> out;
    std::set<std::pair<std::vector<i64>, std::vector<i64>>> seen; // (entries, target)
    IntMatrix g2(2, {2 * f.a, f.two_b, f.two_b, 2 * f.c});
    i64 d = f.determinant();
    for (i64 k = 1; k <= opts.max_det_b; ++k) {
        for (auto [t1, t2] : divisor_pairs(d * k * k)) {
            if (represent(f, t1).empty() || represent(f, t2).empty()) continue;
            std::vector<i64> target{t1, t2};
            i64 bound = default_entry_bound(g2, target);
            for (const auto& b : find_congruence_matrices(g2, target, bound)) {
                i64 db = det(b);
                if ((db < 0 ? -db : db) != k) continue;
                if (!seen.insert({b.e, target}).second) continue;
                Diagonalizer dg;
                dg.B = b;
                dg.target = target;
                if (auto simple = is_simple_covering(b))
                    dg.cs = CosetSystem::along_axis(b, simple->first, -((k - 1) / 2), k / 2);
                else
                    dg.cs = canonical_cosets(b);
                out.push_back(std::move(dg));
            }
        }
    }
    return out;
}

} // namespace detail

inline ScanResult scan_form(const BinaryForm& f, const ScanOptions& opts) {
    ScanResult res;
    res.determinant = f.determinant();
    res.form = f;
    res.diagonalizers = detail::collect_diagonalizers(f, opts);
    if (res.diagonalizers.size() < 2) return res;

    i64 box = opts.lin_box >= 0 ? opts.lin_box : 2 * std::max(f.a, f.c);
    std::set<std::pair<std::string, std::string>> emitted;
    // X -> -X maps d to -d, so sweep only canonical linear parts.
    for (i64 d1 = 0; d1 <= box; ++d1)
        for (i64 d2 = (d1 == 0 ? 0 : -box); d2 <= box; ++d2)
            for (int delta = 0; delta < 4; ++delta) {
                ExtendedQuadForm F = ExtendedQuadForm::binary(f.a, f.two_b, f.c, d1, d2, 0,
                                                              delta >> 1, delta & 1);
                std::vector<ThetaCombination> expansions;
                expansions.reserve(res.diagonalizers.size());
                bool bad = false;
                for (const auto& dg : res.diagonalizers) {
                    try {
                        expansions.push_back(expand(F, dg.cs, 40));
                    } catch (const error&) {
                        bad = true;
                        break;
                    }
                }
                if (bad) continue;
                for (std::size_t i = 0; i < expansions.size(); ++i)
                    for (std::size_t j = i + 1; j < expansions.size(); ++j) {
                        if (expansions[i].all_vanishing()) continue;
                        std::string li = to_string(expansions[i]);
                        std::string rj = to_string(expansions[j]);
                        if (li == rj) continue; // structurally identical
                        if (!emitted.insert({li, rj}).second) continue;
                        CandidateIdentity cand;
                        cand.form = F;
                        cand.d1 = i;
                        cand.d2 = j;
                        cand.lhs = li;
                        cand.rhs = rj;
                        cand.verified = eq_to_order(expansions[i].series(opts.order),
                                                    expansions[j].series(opts.order), opts.order);
                        if (cand.verified) res.candidates.push_back(std::move(cand));
                    }
            }
    return res;
}

inline std::vector<ScanResult> scan(const ScanOptions& opts) {
    std::vector<ScanResult> out;
    for (i64 d = 1; d <= opts.max_det; ++d)
        for (const auto& f : enumerate_reduced_primitive(d)) {
            if (!opts.include_mirrors && f.two_b < 0) continue;
            out.push_back(scan_form(f, opts));
        }
    return out;
}

/// Corpus-format record for a discovered pair, ready to be dropped into the
/// corpus directory.
inline std::string candidate_to_record(const ScanResult& res, const CandidateIdentity& c,
                                       int index) {
    std::ostringstream out;
    out << "id: SCAN-D" << res.determinant << "-" << index << "\n";
    out << "scale: 1\n";
    out << "lhs: " << c.lhs << "\n";
    out << "rhs: " << c.rhs << "\n";
    out << "form: " << form_to_string(c.form) << "\n";
    const Diagonalizer& a = res.diagonalizers[c.d1];
    const Diagonalizer& b = res.diagonalizers[c.d2];
    auto shifts_of = [](const CosetSystem& cs) {
        std::ostringstream s;
        for (std::size_t i = 0; i < cs.reps.size(); ++i) {
            if (i) s << ",";
            s << "(" << vector_to_string(cs.reps[i]) << ")";
        }
        return s.str();
    };
    out << "B1: " << a.B.to_string() << " | shifts: " << shifts_of(a.cs) << "\n";
    out << "B2: " << b.B.to_string() << " | shifts: " << shifts_of(b.cs) << "\n";
    out << "match: both\n";
    out << "notes: scan discovery; diagonal targets " << vector_to_string(a.target) << " and "
        << vector_to_string(b.target) << "\n";
    return out.str();
}

} // namespace thetaforge
