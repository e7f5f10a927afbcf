#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "svident/terracini.hpp"

namespace svident {

/// First-order tangential contact analysis at a base point x_i.
///
/// The tangent directions of the contact locus at x_i lie in the kernel of
/// every Hessian Q_H of the tangential system, so the dimension of the
/// common kernel (gamma_hat) bounds gamma_h from above and agrees with it
/// for general points. X is reported h-twd when gamma_hat > 0.
struct ContactReport {
    int h = 0;
    std::size_t form_count = 0;
    std::vector<std::size_t> per_form_kernel_dims; // random combinations of the basis
    std::size_t common_kernel_dim = 0;             // gamma_hat
    bool twd = false;
    std::size_t base_point_index = 0;
    Mode mode = Mode::Exact;
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultTrials = 5;

namespace detail {

template <typename T>
std::vector<T> random_combination(const Matrix<T>& forms, Rng& rng) {
    std::vector<T> combo(forms.cols(), T(0));
    while (true) {
        bool nonzero = false;
        for (std::size_t r = 0; r < forms.rows(); ++r) {
            const auto c = rng.uniform_int(-100, 100);
            if (c != 0) nonzero = true;
            for (std::size_t k = 0; k < forms.cols(); ++k) combo[k] += T(static_cast<long>(c)) * forms(r, k);
        }
        if (nonzero) return combo;
    }
}

template <typename T>
std::size_t kernel_dim(const Matrix<T>& m) {
    return m.cols() - rank(m);
}

template <typename T>
ContactReport analyze_contact(const SVSpec& spec, const PointSample& sample, const TangentialSystem<T>& system,
                              std::size_t base_index, int trials, std::uint64_t seed, Mode mode) {
    const Embedding<T> emb(spec);
    const Point<T> base = to_point<T>(sample.points.at(base_index));

    ContactReport out;
    out.h = system.h;
    out.form_count = system.count();
    out.base_point_index = base_index;
    out.mode = mode;
    out.seed = seed;

    Matrix<T> stacked;
    for (std::size_t r = 0; r < system.forms.rows(); ++r) stacked.append_rows(emb.hessian(base, system.forms.row(r)));
    out.common_kernel_dim = kernel_dim(stacked);
    out.twd = out.common_kernel_dim > 0;

    Rng rng(derive_seed(seed, {0x636f6d626fULL, static_cast<std::uint64_t>(system.h), base_index}));
    for (int t = 0; t < trials; ++t) {
        const auto combo = random_combination(system.forms, rng);
        out.per_form_kernel_dims.push_back(kernel_dim(emb.hessian(base, std::span<const T>(combo))));
    }
    return out;
}

template <typename T>
ContactReport twd_test_typed(const SVSpec& spec, int h, std::uint64_t seed, int trials, std::size_t base_index) {
    const auto sample = sample_points(spec, h, seed);
    const auto system = tangential_system<T>(spec, sample);
    return analyze_contact(spec, sample, system, base_index, trials, seed,
                           is_exact_v<T> ? Mode::Exact : Mode::Float);
}

} // namespace detail

/// Hessian-kernel twd test at x_1 of a fresh sample of h points.
inline ContactReport twd_test(const SVSpec& spec, int h, std::uint64_t seed, Mode mode = Mode::Exact,
                              int trials = kDefaultTrials) {
    return mode == Mode::Exact ? detail::twd_test_typed<mpq_class>(spec, h, seed, trials, 0)
                               : detail::twd_test_typed<double>(spec, h, seed, trials, 0);
}

/// The same test at every sample point; generically all agree.
inline std::vector<ContactReport> twd_test_all_points(const SVSpec& spec, int h, std::uint64_t seed,
                                                      Mode mode = Mode::Exact, int trials = kDefaultTrials) {
    std::vector<ContactReport> out;
    for (int i = 0; i < h; ++i)
        out.push_back(mode == Mode::Exact
                          ? detail::twd_test_typed<mpq_class>(spec, h, seed, trials, static_cast<std::size_t>(i))
                          : detail::twd_test_typed<double>(spec, h, seed, trials, static_cast<std::size_t>(i)));
    return out;
}

/// Contact analysis at h = g - 1 for perfect, non-defective formats, where
/// the expectation is gamma_hat = 0 whenever g > 2 dim X.
struct ZeroDimReport {
    ContactReport contact;
    std::vector<TerraciniReport> terracini; // h = 1 .. g - 1
    bool rank_condition = false;            // g > 2 dim X: expectation backed by theory
    bool matches_expectation = false;       // gamma_hat == 0
};

/// Verifies perfection and defect-freeness through g - 1 first; throws
/// HypothesisUnmet otherwise.
inline ZeroDimReport zero_dim_check(const SVSpec& spec, std::uint64_t seed, Mode mode = Mode::Exact,
                                    int trials = kDefaultTrials) {
    const auto profile = rank_profile(spec);
    if (!profile.perfect) throw Error(ErrorCode::HypothesisUnmet, to_string(spec) + " is not perfect");
    const int g = generic_rank_int(spec);
    if (g < 2) throw Error(ErrorCode::HypothesisUnmet, to_string(spec) + " has generic rank 1");

    ZeroDimReport out;
    auto scan = defectivity_scan(spec, seed, mode);
    scan.resize(static_cast<std::size_t>(g - 1));
    for (const auto& r : scan)
        if (r.defect > 0)
            throw Error(ErrorCode::HypothesisUnmet, to_string(spec) + " is " + std::to_string(r.h) + "-defective");
    out.terracini = std::move(scan);
    out.rank_condition = profile.generic_rank > 2 * profile.variety_dim;
    out.contact = twd_test(spec, g - 1, seed, mode, trials);
    out.matches_expectation = out.contact.common_kernel_dim == 0;
    return out;
}

/// rank(Q_l) at x_1 for `trials` random forms l of the tangential system.
inline std::vector<std::size_t> hessian_rank_profile(const SVSpec& spec, int h, std::uint64_t seed, int trials,
                                                     Mode mode = Mode::Exact) {
    const ContactReport report = twd_test(spec, h, seed, mode, trials);
    std::vector<std::size_t> out;
    for (std::size_t k : report.per_form_kernel_dims) out.push_back(static_cast<std::size_t>(spec.dim()) - k);
    return out;
}

} // namespace svident
