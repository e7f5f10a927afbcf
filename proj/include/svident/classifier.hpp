#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "svident/spec.hpp"

namespace svident {

/// Numerology of a Segre-Veronese format. N and g are arbitrary precision:
/// the product of binomials overflows 64 bits quickly on grid scans.
struct RankProfile {
    mpz_class ambient_dim;  // N, with N + 1 = prod C(n_i + d_i, n_i)
    int variety_dim = 0;    // dim X = sum n_i
    mpz_class generic_rank; // g = ceil((N + 1) / (dim X + 1))
    bool perfect = false;   // (dim X + 1) divides (N + 1)
};

enum class Verdict { NotIdentifiableByTheorem, Inconclusive };

inline const char* to_string(Verdict v) noexcept {
    return v == Verdict::NotIdentifiableByTheorem ? "NotIdentifiableByTheorem" : "Inconclusive";
}

/// Evaluation of the non-identifiability criterion: all d_i > n_i + 1 and
/// g > 2 dim X. The pivot maximizes (n_i + 1) / d_i and fixes the slope
/// a = d_pivot / (n_pivot + 1) together with the NEF margins
/// -(n_i + 1) + (n_pivot + 1) d_i / d_pivot, all of which are >= 0.
struct CriterionReport {
    bool degree_hypothesis = false;
    bool rank_hypothesis = false;
    std::size_t pivot = 0; // zero-based factor index
    mpq_class slope_a;
    std::vector<mpq_class> nef_margins;
    Verdict verdict = Verdict::Inconclusive;
};

inline mpz_class binomial(unsigned long top, unsigned long bottom) {
    mpz_class out;
    mpz_bin_uiui(out.get_mpz_t(), top, bottom);
    return out;
}

inline RankProfile rank_profile(const SVSpec& spec) {
    validate(spec);
    mpz_class size = 1;
    for (std::size_t i = 0; i < spec.factors(); ++i)
        size *= binomial(static_cast<unsigned long>(spec.n[i] + spec.d[i]),
                         static_cast<unsigned long>(spec.n[i]));
    RankProfile out;
    out.variety_dim = spec.dim();
    out.ambient_dim = size - 1;
    const mpz_class per_point = out.variety_dim + 1;
    mpz_cdiv_q(out.generic_rank.get_mpz_t(), size.get_mpz_t(), per_point.get_mpz_t());
    out.perfect = mpz_divisible_p(size.get_mpz_t(), per_point.get_mpz_t()) != 0;
    return out;
}

inline CriterionReport criterion(const SVSpec& spec) {
    const RankProfile profile = rank_profile(spec);
    CriterionReport out;

    out.degree_hypothesis = true;
    for (std::size_t i = 0; i < spec.factors(); ++i)
        if (!(spec.d[i] > spec.n[i] + 1)) out.degree_hypothesis = false;
    out.rank_hypothesis = profile.generic_rank > 2 * profile.variety_dim;

    // Strict comparison keeps the smallest index among ties.
    mpq_class best(spec.n[0] + 1, spec.d[0]);
    best.canonicalize();
    for (std::size_t i = 1; i < spec.factors(); ++i) {
        mpq_class ratio(spec.n[i] + 1, spec.d[i]);
        ratio.canonicalize();
        if (ratio > best) {
            best = ratio;
            out.pivot = i;
        }
    }
    out.slope_a = 1 / best;

    out.nef_margins.reserve(spec.factors());
    for (std::size_t i = 0; i < spec.factors(); ++i) {
        mpq_class margin = best * spec.d[i] - (spec.n[i] + 1);
        margin.canonicalize();
        out.nef_margins.push_back(margin);
    }

    out.verdict = out.degree_hypothesis && out.rank_hypothesis ? Verdict::NotIdentifiableByTheorem
                                                               : Verdict::Inconclusive;
    return out;
}

struct ScanEntry {
    SVSpec spec;
    RankProfile profile;
    CriterionReport report;
};

/// Every format with r <= r_max, n_i <= n_max, d_i <= d_max, one per
/// isomorphism class: factors are kept sorted by (n_i, d_i). Output is
/// ordered by r, then lexicographically by the factor sequence.
inline std::vector<ScanEntry> scan(int n_max, int d_max, int r_max) {
    if (n_max < 1 || d_max < 1 || r_max < 1)
        throw Error(ErrorCode::InvalidArgument, "scan bounds must be >= 1");

    std::vector<std::pair<int, int>> pairs;
    for (int n = 1; n <= n_max; ++n)
        for (int d = 1; d <= d_max; ++d) pairs.emplace_back(n, d);

    std::vector<ScanEntry> out;
    for (int r = 1; r <= r_max; ++r) {
        // Non-decreasing index sequences enumerate multisets of size r.
        std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
        while (true) {
            SVSpec spec;
            for (std::size_t k : idx) {
                spec.n.push_back(pairs[k].first);
                spec.d.push_back(pairs[k].second);
            }
            out.push_back({spec, rank_profile(spec), criterion(spec)});

            std::size_t pos = idx.size();
            while (pos > 0 && idx[pos - 1] + 1 == pairs.size()) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            std::fill(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.end(), idx[pos - 1]);
        }
    }
    return out;
}

} // namespace svident
