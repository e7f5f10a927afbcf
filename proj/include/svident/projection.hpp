#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "svident/terracini.hpp"

namespace svident {

/// Tangential projection tau_h: x -> (<l_1, embed(x)> : ... : <l_k, embed(x)>),
/// the linear projection from the span of the tangent spaces at the sample.
template <typename T>
struct ProjectionMap {
    int h = 0;
    PointSample sample;
    TangentialSystem<T> system;
    std::size_t target_dim = 0; // form count - 1

    std::vector<T> operator()(const Embedding<T>& emb, const Point<T>& x) const {
        const auto v = emb.embed(x);
        std::vector<T> out;
        for (std::size_t r = 0; r < system.forms.rows(); ++r) out.push_back(dot(system.forms.row(r), v));
        return out;
    }

    /// Rows: tau(x) followed by its chart derivatives; the differential of the
    /// projectivized map has rank one less than this matrix.
    Matrix<T> jacobian(const Embedding<T>& emb, const Point<T>& x) const {
        return emb.tangent_frame(x) * system.forms.transpose();
    }
};

template <typename T>
ProjectionMap<T> tangential_projection(const SVSpec& spec, int h, std::uint64_t seed) {
    ProjectionMap<T> out;
    out.h = h;
    out.sample = sample_points(spec, h, seed);
    out.system = tangential_system<T>(spec, out.sample);
    out.target_dim = out.system.count() - 1;
    return out;
}

struct FinitenessReport {
    int h = 0;
    std::size_t jacobian_rank = 0; // rank of d tau_h at a fresh point
    std::size_t target_dim = 0;
    bool generically_finite = false; // jacobian_rank == dim X (certified in exact mode)
    bool fiber_type = false;         // jacobian_rank < dim X (with high probability)
    int attempts = 1;
    Mode mode = Mode::Exact;
    std::uint64_t seed = 0;
};

/// Fresh evaluation points tried before declaring tau_{g-1} of fiber type.
inline constexpr int kFinitenessAttempts = 3;

namespace detail {

template <typename T>
FinitenessReport finiteness_typed(const SVSpec& spec, std::uint64_t seed) {
    const int g = generic_rank_int(spec);
    if (g < 2) throw Error(ErrorCode::HypothesisUnmet, "finiteness check needs generic rank >= 2");
    const Embedding<T> emb(spec);
    const auto map = tangential_projection<T>(spec, g - 1, seed);

    FinitenessReport out;
    out.h = g - 1;
    out.target_dim = map.target_dim;
    out.mode = is_exact_v<T> ? Mode::Exact : Mode::Float;
    out.seed = seed;
    out.attempts = 0;
    const auto dim = static_cast<std::size_t>(spec.dim());
    for (int attempt = 0; attempt < kFinitenessAttempts && out.jacobian_rank < dim; ++attempt) {
        ++out.attempts;
        Rng rng(derive_seed(seed, {0x6672657368ULL, static_cast<std::uint64_t>(attempt)}));
        IntPoint fresh;
        do {
            fresh = draw_point(spec, rng);
        } while (std::find(map.sample.points.begin(), map.sample.points.end(), fresh) != map.sample.points.end());
        const std::size_t r = rank(map.jacobian(emb, to_point<T>(fresh)));
        out.jacobian_rank = std::max(out.jacobian_rank, r == 0 ? std::size_t{0} : r - 1);
    }
    out.generically_finite = out.jacobian_rank == dim;
    out.fiber_type = out.jacobian_rank < dim;
    return out;
}

} // namespace detail

/// Generic finiteness of tau_{g-1}, a necessary condition for
/// identifiability. Birationality is not decided.
inline FinitenessReport finiteness_check(const SVSpec& spec, std::uint64_t seed, Mode mode = Mode::Exact) {
    return mode == Mode::Exact ? detail::finiteness_typed<mpq_class>(spec, seed)
                               : detail::finiteness_typed<double>(spec, seed);
}

} // namespace svident
