#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "svident/classifier.hpp"
#include "svident/embedding.hpp"
#include "svident/hungarian.hpp"
#include "svident/random.hpp"

namespace svident {

using cplx = std::complex<double>;

/// weight * embed(points): one rank-1 term.
struct Term {
    cplx weight;
    Point<cplx> points;
};

struct Decomposition {
    SVSpec spec;
    std::vector<Term> terms;

    std::size_t rank() const noexcept { return terms.size(); }
};

struct SearchConfig {
    int starts = 64;
    int max_iter = 200;
    double residual_tol = 1e-10; // relative to |T|
    double match_tol = 1e-6;
    std::uint64_t seed = 0;
    int threads = 0; // 0: hardware concurrency
};

inline void validate(const SearchConfig& c) {
    if (c.starts < 1 || c.max_iter < 1 || !(c.residual_tol > 0) || !(c.match_tol > 0) || c.threads < 0)
        throw Error(ErrorCode::InvalidArgument, "search configuration values must be positive");
}

inline double norm(const std::vector<cplx>& v) {
    double acc = 0;
    for (const cplx& x : v) acc += std::norm(x);
    return std::sqrt(acc);
}

/// Sum of the terms as an ambient vector.
inline std::vector<cplx> evaluate(const Decomposition& dec) {
    const Embedding<cplx> emb(dec.spec);
    std::vector<cplx> out(emb.ambient_size(), cplx(0));
    for (const Term& t : dec.terms) {
        const auto v = emb.embed(t.points);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += t.weight * v[k];
    }
    return out;
}

/// |evaluate(dec) - T| / |T|.
inline double relative_residual(const Decomposition& dec, const std::vector<cplx>& tensor) {
    auto r = evaluate(dec);
    if (r.size() != tensor.size()) throw Error(ErrorCode::InvalidArgument, "tensor has wrong length");
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= tensor[k];
    return norm(r) / norm(tensor);
}

/// Unit-norm factor points whose largest-modulus coordinate (first on ties)
/// is real and positive; the removed scale goes into the weight. Terms are
/// then sorted lexicographically by coordinates.
inline Decomposition canonicalize(Decomposition dec) {
    for (Term& t : dec.terms) {
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            auto& x = t.points[i];
            const double nrm = norm(x);
            if (nrm == 0) throw Error(ErrorCode::ZeroPoint, "factor point " + std::to_string(i + 1) + " is zero");
            std::size_t lead = 0;
            for (std::size_t k = 1; k < x.size(); ++k)
                if (std::abs(x[k]) > std::abs(x[lead])) lead = k;
            const cplx scale = nrm * (x[lead] / std::abs(x[lead]));
            for (cplx& c : x) c /= scale;
            x[lead] = cplx(std::abs(x[lead]), 0.0);
            t.weight *= std::pow(scale, dec.spec.d[i]);
        }
    }
    auto key = [](const Term& t) {
        std::vector<double> k;
        for (const auto& x : t.points)
            for (const cplx& c : x) {
                k.push_back(c.real());
                k.push_back(c.imag());
            }
        k.push_back(t.weight.real());
        k.push_back(t.weight.imag());
        return k;
    };
    std::stable_sort(dec.terms.begin(), dec.terms.end(),
                     [&](const Term& a, const Term& b) { return key(a) < key(b); });
    return dec;
}

/// Max of the factor point distances and the relative weight difference,
/// for canonicalized terms.
inline double term_distance(const Term& a, const Term& b) {
    const double scale = std::max(std::abs(a.weight), std::abs(b.weight));
    double out = scale == 0 ? 0.0 : std::abs(a.weight - b.weight) / scale;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        double acc = 0;
        for (std::size_t k = 0; k < a.points[i].size(); ++k) acc += std::norm(a.points[i][k] - b.points[i][k]);
        out = std::max(out, std::sqrt(acc));
    }
    return out;
}

/// Largest term distance under the optimal term matching; infinite for
/// decompositions of different length.
inline double matched_distance(const Decomposition& a, const Decomposition& b) {
    if (a.rank() != b.rank()) return std::numeric_limits<double>::infinity();
    if (a.rank() == 0) return 0.0;
    std::vector<std::vector<double>> cost(a.rank(), std::vector<double>(b.rank()));
    for (std::size_t i = 0; i < a.rank(); ++i)
        for (std::size_t j = 0; j < b.rank(); ++j) cost[i][j] = term_distance(a.terms[i], b.terms[j]);
    const auto assignment = min_cost_assignment(cost);
    double out = 0;
    for (std::size_t i = 0; i < a.rank(); ++i) out = std::max(out, cost[i][assignment[i]]);
    return out;
}

// Synthesis -------------------------------------------------------------------

struct Synthesis {
    std::vector<cplx> tensor;
    Decomposition planted; // canonicalized
};

inline Synthesis synthesize(const SVSpec& spec, int g, std::uint64_t seed) {
    validate(spec);
    if (g < 1) throw Error(ErrorCode::InvalidArgument, "rank must be at least 1");
    Rng rng(seed);
    Decomposition dec{spec, {}};
    for (int j = 0; j < g; ++j) {
        Term t;
        t.weight = rng.complex_normal();
        for (std::size_t i = 0; i < spec.factors(); ++i) {
            FactorPoint<cplx> x;
            for (int k = 0; k <= spec.n[i]; ++k) x.push_back(rng.complex_normal());
            t.points.push_back(std::move(x));
        }
        dec.terms.push_back(std::move(t));
    }
    Synthesis out;
    out.tensor = evaluate(dec);
    out.planted = canonicalize(std::move(dec));
    return out;
}

// Fitting ---------------------------------------------------------------------

enum class FitStatus { Converged, MaxIter, Stalled };

inline const char* to_string(FitStatus s) noexcept {
    switch (s) {
    case FitStatus::Converged: return "Converged";
    case FitStatus::MaxIter: return "MaxIter";
    case FitStatus::Stalled: return "Stalled";
    }
    return "?";
}

struct FitResult {
    FitStatus status = FitStatus::MaxIter;
    Decomposition decomposition; // canonicalized final iterate
    double residual = 0;         // recomputed from the result, relative to |T|
    int iterations = 0;

    bool ok() const noexcept { return status == FitStatus::Converged; }
};

namespace detail {

inline constexpr double kStallStep = 1e-12;
inline constexpr double kInitialDamping = 1e-3;
inline constexpr int kPolishSteps = 20;

/// The weights enter linearly, so they are eliminated: for given factor
/// points they are the least-squares optimum, and the search runs over the
/// homogeneous coordinates of all factor points (variable projection with
/// Kaufman's Jacobian).
class ProjectedModel {
public:
    ProjectedModel(const SVSpec& spec, int g) : emb_(spec), g_(g) {
        for (int n : spec.n) per_term_ += static_cast<std::size_t>(n) + 1;
    }

    std::size_t parameters() const noexcept { return static_cast<std::size_t>(g_) * per_term_; }
    std::size_t size() const noexcept { return emb_.ambient_size(); }

    Point<cplx> point(const Eigen::VectorXcd& theta, int j) const {
        Point<cplx> p;
        auto at = static_cast<Eigen::Index>(static_cast<std::size_t>(j) * per_term_);
        for (int n : emb_.spec().n) {
            FactorPoint<cplx> x;
            for (int k = 0; k <= n; ++k) x.push_back(theta(at++));
            p.push_back(std::move(x));
        }
        return p;
    }

    /// Columns embed(p_j).
    Eigen::MatrixXcd basis(const Eigen::VectorXcd& theta) const {
        Eigen::MatrixXcd b(static_cast<Eigen::Index>(size()), g_);
        for (int j = 0; j < g_; ++j) {
            const auto v = emb_.embed(point(theta, j));
            for (std::size_t k = 0; k < v.size(); ++k) b(static_cast<Eigen::Index>(k), j) = v[k];
        }
        return b;
    }

    struct State {
        Eigen::VectorXcd theta;
        Eigen::VectorXcd weights;
        Eigen::VectorXcd residual; // basis * weights - target
        double cost = 0;
    };

    State evaluate(Eigen::VectorXcd theta, const Eigen::VectorXcd& target) const {
        const Eigen::MatrixXcd b = basis(theta);
        State s;
        s.weights = b.colPivHouseholderQr().solve(target);
        s.residual = b * s.weights - target;
        s.cost = s.residual.norm();
        s.theta = std::move(theta);
        return s;
    }

    /// Rescales every factor point to unit norm; the optimal weights absorb it.
    void normalize(Eigen::VectorXcd& theta) const {
        Eigen::Index at = 0;
        for (int j = 0; j < g_; ++j)
            for (int n : emb_.spec().n) {
                const double len = theta.segment(at, n + 1).norm();
                if (len > 0) theta.segment(at, n + 1) /= len;
                at += n + 1;
            }
    }

    /// Derivative of the residual with the weights held fixed, projected
    /// onto the orthogonal complement of the basis.
    Eigen::MatrixXcd jacobian(const State& s) const {
        const auto m = static_cast<Eigen::Index>(size());
        Eigen::MatrixXcd jac(m, static_cast<Eigen::Index>(parameters()));
        for (int j = 0; j < g_; ++j) {
            const auto p = point(s.theta, j);
            auto col = static_cast<Eigen::Index>(static_cast<std::size_t>(j) * per_term_);
            for (std::size_t i = 0; i < p.size(); ++i)
                for (int k = 0; k <= emb_.spec().n[i]; ++k, ++col) {
                    const auto d = emb_.partial(p, i, k);
                    for (Eigen::Index r = 0; r < m; ++r) jac(r, col) = s.weights(j) * d[static_cast<std::size_t>(r)];
                }
        }
        const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis(s.theta));
        const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, std::min<Eigen::Index>(m, g_));
        return jac - q * (q.adjoint() * jac);
    }

    Eigen::VectorXcd to_parameters(const Decomposition& dec) const {
        Eigen::VectorXcd theta(static_cast<Eigen::Index>(parameters()));
        Eigen::Index at = 0;
        for (const Term& t : dec.terms)
            for (const auto& x : t.points)
                for (const cplx& c : x) theta(at++) = c;
        return theta;
    }

    Decomposition to_decomposition(const State& s, double scale) const {
        Decomposition dec{emb_.spec(), {}};
        for (int j = 0; j < g_; ++j) dec.terms.push_back(Term{s.weights(j) * scale, point(s.theta, j)});
        return dec;
    }

private:
    Embedding<cplx> emb_;
    int g_;
    std::size_t per_term_ = 0;
};

/// Real and imaginary parts stacked: a complex matrix A acts on (Re x, Im x)
/// as [[Re A, -Im A], [Im A, Re A]].
inline Eigen::MatrixXd realify(const Eigen::MatrixXcd& a) {
    const auto m = a.rows(), n = a.cols();
    Eigen::MatrixXd out(2 * m, 2 * n);
    out.topLeftCorner(m, n) = a.real();
    out.topRightCorner(m, n) = -a.imag();
    out.bottomLeftCorner(m, n) = a.imag();
    out.bottomRightCorner(m, n) = a.real();
    return out;
}

inline Eigen::VectorXd realify(const Eigen::VectorXcd& v) {
    Eigen::VectorXd out(2 * v.size());
    out << v.real(), v.imag();
    return out;
}

inline Eigen::VectorXcd complexify(const Eigen::VectorXd& v) {
    const auto n = v.size() / 2;
    Eigen::VectorXcd out(n);
    for (Eigen::Index k = 0; k < n; ++k) out(k) = cplx(v(k), v(n + k));
    return out;
}

/// One damped step from s; returns whether it lowered the cost.
inline bool lm_step(const ProjectedModel& model, ProjectedModel::State& s, const Eigen::VectorXcd& target,
                    double& lambda, double& step_norm) {
    const Eigen::MatrixXd jac = realify(model.jacobian(s));
    Eigen::MatrixXd damped = jac.transpose() * jac;
    damped.diagonal().array() += lambda;
    const Eigen::VectorXd step = damped.ldlt().solve(-(jac.transpose() * realify(s.residual)));
    if (!step.allFinite()) {
        step_norm = 0;
        return false;
    }
    step_norm = step.norm();
    Eigen::VectorXcd candidate = s.theta + complexify(step);
    model.normalize(candidate);
    auto next = model.evaluate(std::move(candidate), target);
    if (std::isfinite(next.cost) && next.cost < s.cost) {
        s = std::move(next);
        lambda *= 0.5;
        return true;
    }
    lambda *= 4.0;
    return false;
}

inline FitResult levenberg_marquardt(const ProjectedModel& model, Eigen::VectorXcd theta,
                                     const std::vector<cplx>& tensor, const SearchConfig& config) {
    const double scale = norm(tensor);
    if (scale == 0) throw Error(ErrorCode::InvalidArgument, "target tensor is zero");
    Eigen::VectorXcd target(static_cast<Eigen::Index>(tensor.size()));
    for (std::size_t k = 0; k < tensor.size(); ++k) target(static_cast<Eigen::Index>(k)) = tensor[k] / scale;

    FitResult out;
    double lambda = kInitialDamping;
    model.normalize(theta);
    auto state = model.evaluate(std::move(theta), target);
    bool stalled = false;
    double step_norm = 0;
    while (state.cost > config.residual_tol && out.iterations < config.max_iter) {
        ++out.iterations;
        if (!lm_step(model, state, target, lambda, step_norm) && step_norm == 0) {
            stalled = true;
            break;
        }
        if (state.cost > config.residual_tol && step_norm < kStallStep * state.theta.norm()) {
            stalled = true;
            break;
        }
    }
    // A residual at the tolerance can leave the factor points of an
    // ill-conditioned decomposition accurate only to about 1e-5; refine
    // until the cost stops decreasing so that matching is reliable.
    if (state.cost <= config.residual_tol)
        for (int k = 0; k < kPolishSteps; ++k)
            if (!lm_step(model, state, target, lambda, step_norm)) break;
    out.decomposition = canonicalize(model.to_decomposition(state, scale));
    out.residual = relative_residual(out.decomposition, tensor);
    if (out.residual <= config.residual_tol)
        out.status = FitStatus::Converged;
    else
        out.status = stalled ? FitStatus::Stalled : FitStatus::MaxIter;
    return out;
}

} // namespace detail

/// Levenberg-Marquardt search for a rank-g decomposition of T from random
/// factor points drawn with start_seed.
inline FitResult fit(const SVSpec& spec, int g, const std::vector<cplx>& tensor, std::uint64_t start_seed,
                     const SearchConfig& config = {}) {
    validate(spec);
    if (g < 1) throw Error(ErrorCode::InvalidArgument, "rank must be at least 1");
    const detail::ProjectedModel model(spec, g);
    if (tensor.size() != model.size()) throw Error(ErrorCode::InvalidArgument, "tensor has wrong length");
    Rng rng(start_seed);
    Eigen::VectorXcd theta(static_cast<Eigen::Index>(model.parameters()));
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = rng.complex_normal();
    return detail::levenberg_marquardt(model, std::move(theta), tensor, config);
}

/// The same search started from the factor points of a given decomposition
/// (its weights are re-solved).
inline FitResult fit_from(const Decomposition& start, const std::vector<cplx>& tensor,
                          const SearchConfig& config = {}) {
    validate(start.spec);
    if (start.rank() < 1) throw Error(ErrorCode::InvalidArgument, "rank must be at least 1");
    const detail::ProjectedModel model(start.spec, static_cast<int>(start.rank()));
    if (tensor.size() != model.size()) throw Error(ErrorCode::InvalidArgument, "tensor has wrong length");
    return detail::levenberg_marquardt(model, model.to_parameters(start), tensor, config);
}

// Clustering ------------------------------------------------------------------

struct Clustering {
    std::vector<std::size_t> labels;          // class of each input, numbered by first appearance
    std::vector<std::size_t> representatives; // first member of each class
    std::vector<std::size_t> sizes;
    std::vector<std::vector<double>> distances; // matched distance between representatives
};

/// Classes are connected components of "matched distance <= match_tol";
/// components whose representatives lie within 10 match_tol are merged so
/// that distinct classes are separated by more than the tolerance band.
inline Clustering cluster(const std::vector<Decomposition>& decs, double match_tol) {
    const std::size_t n = decs.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[i][j] = dist[j][i] = matched_distance(decs[i], decs[j]);
            if (dist[i][j] <= match_tol) unite(i, j);
        }
    // Roots are the smallest index of each component.
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i)
        if (find(i) == i) roots.push_back(i);
    for (std::size_t a = 0; a < roots.size(); ++a)
        for (std::size_t b = a + 1; b < roots.size(); ++b)
            if (dist[roots[a]][roots[b]] <= 10 * match_tol) unite(roots[a], roots[b]);

    Clustering out;
    out.labels.assign(n, 0);
    std::vector<std::size_t> label_of_root(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (label_of_root[root] == n) {
            label_of_root[root] = out.representatives.size();
            out.representatives.push_back(i);
            out.sizes.push_back(0);
        }
        out.labels[i] = label_of_root[root];
        ++out.sizes[out.labels[i]];
    }
    const std::size_t k = out.representatives.size();
    out.distances.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) out.distances[a][b] = dist[out.representatives[a]][out.representatives[b]];
    return out;
}

// Evidence --------------------------------------------------------------------

enum class EvidenceVerdict { NonIdentifiableEvidence, NoCounterexampleFound };

inline const char* to_string(EvidenceVerdict v) noexcept {
    return v == EvidenceVerdict::NonIdentifiableEvidence ? "NonIdentifiableEvidence" : "NoCounterexampleFound";
}

struct StartOutcome {
    std::uint64_t seed = 0;
    FitStatus status = FitStatus::MaxIter;
    double residual = 0;
    int iterations = 0;
};

struct EvidenceReport {
    SVSpec spec;
    int g = 0;
    SearchConfig config;
    std::vector<StartOutcome> outcomes; // one per start, in start order
    std::size_t successes = 0;
    std::size_t classes_found = 0;
    std::vector<std::size_t> class_sizes;
    std::vector<Decomposition> representatives;
    std::vector<std::vector<double>> pairwise_distances; // between representatives
    std::vector<double> residuals;                       // successful fits, in start order
    std::vector<cplx> tensor;                            // the synthesized target
    Decomposition planted;
    bool planted_recovered = false;
    bool degenerate = false; // fewer than two successful fits
    EvidenceVerdict verdict = EvidenceVerdict::NoCounterexampleFound;
};

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Synthesize a random rank-g tensor, fit it from config.starts random
/// starts, and cluster the successful fits. g defaults to the generic rank.
inline EvidenceReport identifiability_evidence(const SVSpec& spec, const SearchConfig& config,
                                               std::optional<int> rank = std::nullopt) {
    validate(spec);
    validate(config);
    EvidenceReport out;
    out.spec = spec;
    out.config = config;
    if (rank) {
        out.g = *rank;
    } else {
        const auto g = rank_profile(spec).generic_rank;
        if (!g.fits_sint_p()) throw Error(ErrorCode::TooLarge, to_string(spec));
        out.g = static_cast<int>(g.get_si());
    }
    if (out.g < 1) throw Error(ErrorCode::InvalidArgument, "rank must be at least 1");

    const Synthesis synth = synthesize(spec, out.g, derive_seed(config.seed, {0x706c616e74ULL}));
    out.planted = synth.planted;
    out.tensor = synth.tensor;

    const auto starts = static_cast<std::size_t>(config.starts);
    std::vector<FitResult> fits(starts);
    std::vector<std::uint64_t> seeds(starts);
    for (std::size_t s = 0; s < starts; ++s) seeds[s] = derive_seed(config.seed, {s});
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next++; s < starts; s = next++) fits[s] = fit(spec, out.g, synth.tensor, seeds[s], config);
    };
    const int threads = std::min(resolve_threads(config.threads), config.starts);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<Decomposition> found;
    for (std::size_t s = 0; s < starts; ++s) {
        const FitResult& f = fits[s];
        out.outcomes.push_back(StartOutcome{seeds[s], f.status, f.residual, f.iterations});
        if (!f.ok()) continue;
        found.push_back(f.decomposition);
        out.residuals.push_back(f.residual);
    }
    out.successes = found.size();
    out.degenerate = out.successes < 2;

    const Clustering c = cluster(found, config.match_tol);
    out.classes_found = c.representatives.size();
    out.class_sizes = c.sizes;
    out.pairwise_distances = c.distances;
    for (std::size_t r : c.representatives) out.representatives.push_back(found[r]);
    for (const auto& d : found)
        if (matched_distance(d, out.planted) <= config.match_tol) out.planted_recovered = true;
    out.verdict = out.classes_found >= 2 ? EvidenceVerdict::NonIdentifiableEvidence
                                         : EvidenceVerdict::NoCounterexampleFound;
    return out;
}

} // namespace svident
