#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "svident/classifier.hpp"
#include "svident/embedding.hpp"
#include "svident/linalg.hpp"
#include "svident/random.hpp"

namespace svident {

/// Arithmetic used for rank and kernel decisions.
enum class Mode { Exact, Float };

inline const char* to_string(Mode m) noexcept { return m == Mode::Exact ? "exact" : "float"; }

/// Integer coordinates of a sampled point; x_i[0] == 1 for every factor.
using IntPoint = std::vector<std::vector<long>>;

/// Sampled coordinates lie in [-kSampleBound, kSampleBound].
inline constexpr long kSampleBound = 10000;

/// h general points, reproducible from (spec, h, seed). Samples are nested:
/// the first k points of sample_points(spec, h, seed) are
/// sample_points(spec, k, seed).
struct PointSample {
    std::uint64_t seed = 0;
    int h = 0;
    std::vector<IntPoint> points;

    PointSample prefix(int k) const {
        PointSample out{seed, k, {}};
        out.points.assign(points.begin(), points.begin() + k);
        return out;
    }
};

/// Converts a sampled point into scalar coordinates. Float mode divides the
/// chart coordinates by kSampleBound so monomial values stay O(1).
template <typename T>
Point<T> to_point(const IntPoint& p) {
    Point<T> out;
    for (const auto& factor : p) {
        FactorPoint<T> x;
        for (std::size_t j = 0; j < factor.size(); ++j) {
            if constexpr (is_exact_v<T>)
                x.push_back(T(factor[j]));
            else
                x.push_back(j == 0 ? T(1) : scalar_traits<T>::from_ratio(factor[j], kSampleBound));
        }
        out.push_back(std::move(x));
    }
    return out;
}

inline IntPoint draw_point(const SVSpec& spec, Rng& rng) {
    IntPoint p;
    for (std::size_t i = 0; i < spec.factors(); ++i) {
        std::vector<long> x{1};
        for (int j = 0; j < spec.n[i]; ++j) x.push_back(static_cast<long>(rng.uniform_int(-kSampleBound, kSampleBound)));
        p.push_back(std::move(x));
    }
    return p;
}

inline PointSample sample_points(const SVSpec& spec, int h, std::uint64_t seed) {
    validate(spec);
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "h must be >= 1");
    PointSample out{seed, h, {}};
    Rng rng(seed);
    while (static_cast<int>(out.points.size()) < h) {
        IntPoint p = draw_point(spec, rng);
        // The chart coordinate is 1, so equal vectors <=> equal points.
        if (std::find(out.points.begin(), out.points.end(), p) == out.points.end()) out.points.push_back(std::move(p));
    }
    return out;
}

/// Tangent frames of all sample points stacked: h (dim X + 1) x (N + 1).
template <typename T>
Matrix<T> stacked_frames(const Embedding<T>& emb, const PointSample& sample) {
    Matrix<T> stacked;
    for (const auto& p : sample.points) stacked.append_rows(emb.tangent_frame(to_point<T>(p)));
    return stacked;
}

struct TerraciniReport {
    int h = 0;
    std::size_t expected_affine_rank = 0; // min(h (dim X + 1), N + 1)
    std::size_t measured_rank = 0;
    std::size_t defect = 0;
    Mode mode = Mode::Exact;
    std::uint64_t seed = 0;
    int attempts = 1; // samples tried; > 1 only when a defect was seen
};

/// Retries taken after a positive defect, each on a fresh derived seed.
inline constexpr int kDefectRetries = 2;

namespace detail {

inline std::size_t measure_rank(const SVSpec& spec, const PointSample& sample, Mode mode) {
    if (mode == Mode::Exact) return rank(stacked_frames(Embedding<mpq_class>(spec), sample));
    return rank(stacked_frames(Embedding<double>(spec), sample));
}

inline TerraciniReport finish_report(const SVSpec& spec, const PointSample& sample, std::size_t measured, Mode mode) {
    TerraciniReport out;
    out.h = sample.h;
    out.mode = mode;
    out.seed = sample.seed;
    const std::size_t per_point = static_cast<std::size_t>(spec.dim()) + 1;
    out.expected_affine_rank = std::min(static_cast<std::size_t>(sample.h) * per_point, ambient_size(spec));
    out.measured_rank = measured;
    if (out.defect = out.expected_affine_rank - measured; out.defect > 0) {
        for (int retry = 1; retry <= kDefectRetries; ++retry) {
            const auto fresh = sample_points(spec, sample.h, derive_seed(sample.seed, {static_cast<std::uint64_t>(sample.h),
                                                                                      static_cast<std::uint64_t>(retry)}));
            out.measured_rank = std::max(out.measured_rank, measure_rank(spec, fresh, mode));
            ++out.attempts;
        }
        out.defect = out.expected_affine_rank - out.measured_rank;
    }
    return out;
}

} // namespace detail

/// Affine dimension of the span of h tangent spaces at random points,
/// which by Terracini's lemma is dim Sec_h(X) + 1. In exact mode a zero
/// defect certifies that X is not h-defective; a positive defect means
/// defective with high probability.
inline TerraciniReport secant_rank(const SVSpec& spec, int h, std::uint64_t seed, Mode mode = Mode::Exact) {
    const auto sample = sample_points(spec, h, seed);
    return detail::finish_report(spec, sample, detail::measure_rank(spec, sample, mode), mode);
}

inline int generic_rank_int(const SVSpec& spec) {
    const auto profile = rank_profile(spec);
    if (!profile.generic_rank.fits_sint_p()) throw Error(ErrorCode::TooLarge, to_string(spec));
    return static_cast<int>(profile.generic_rank.get_si());
}

/// Reports for h = 1 .. g on nested samples.
inline std::vector<TerraciniReport> defectivity_scan(const SVSpec& spec, std::uint64_t seed, Mode mode = Mode::Exact) {
    ambient_size(spec);
    const int g = generic_rank_int(spec);
    const auto sample = sample_points(spec, g, seed);
    std::vector<TerraciniReport> out;
    for (int h = 1; h <= g; ++h) {
        const auto sub = sample.prefix(h);
        out.push_back(detail::finish_report(spec, sub, detail::measure_rank(spec, sub, mode), mode));
    }
    return out;
}

/// Basis of the linear forms vanishing on the span M_A of the tangent
/// spaces at the sample points; these define the tangential projection.
template <typename T>
struct TangentialSystem {
    int h = 0;
    Matrix<T> forms; // one form per row, length N + 1
    std::size_t measured_rank = 0;

    std::size_t count() const noexcept { return forms.rows(); }
};

template <typename T>
TangentialSystem<T> tangential_system(const SVSpec& spec, const PointSample& sample) {
    const Embedding<T> emb(spec);
    const Matrix<T> stacked = stacked_frames(emb, sample);
    TangentialSystem<T> out;
    out.h = sample.h;
    out.forms = null_space(stacked);
    if (out.forms.rows() == 0)
        throw Error(ErrorCode::FullSpan, "tangent spaces at " + std::to_string(sample.h) + " points span the ambient space");
    out.measured_rank = emb.ambient_size() - out.forms.rows();
    return out;
}

/// Subsystem of `system` that also vanishes on the tangent frames of the
/// points in `extra`.
template <typename T>
TangentialSystem<T> restrict_system(const SVSpec& spec, const TangentialSystem<T>& system, const PointSample& extra) {
    const Embedding<T> emb(spec);
    const Matrix<T> frames = stacked_frames(emb, extra);
    // Pairings of every extra frame row with every basis form.
    Matrix<T> pairing = frames * system.forms.transpose();
    const Matrix<T> combos = null_space(pairing);
    TangentialSystem<T> out;
    out.h = system.h + extra.h;
    out.forms = combos * system.forms;
    if (out.forms.rows() == 0) throw Error(ErrorCode::FullSpan, "restricted tangential system is empty");
    out.measured_rank = emb.ambient_size() - out.forms.rows();
    return out;
}

} // namespace svident
