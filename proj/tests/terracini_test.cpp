#include <random>

#include <gtest/gtest.h>

#include "frozen_values.hpp"
#include "svident/terracini.hpp"

using namespace svident;

TEST(SamplePoints, DeterministicDistinctAndNested) {
    const SVSpec s = make_spec({1, 2}, {3, 1});
    const auto a = sample_points(s, 3, 42);
    const auto b = sample_points(s, 3, 42);
    EXPECT_EQ(a.points, b.points);
    ASSERT_EQ(a.points.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) EXPECT_NE(a.points[i], a.points[j]);
        for (const auto& factor : a.points[i]) {
            EXPECT_EQ(factor[0], 1);
            for (long c : factor) EXPECT_LE(std::abs(c), kSampleBound);
        }
    }
    EXPECT_NE(sample_points(s, 3, 43).points, a.points);
    EXPECT_EQ(sample_points(s, 5, 42).prefix(3).points, a.points);
}

TEST(SamplePoints, CollisionsAreResampled) {
    // P^1 with one chart coordinate: many draws, all distinct.
    const auto sample = sample_points(make_spec({1}, {1}), 200, 1);
    for (std::size_t i = 0; i < sample.points.size(); ++i)
        for (std::size_t j = i + 1; j < sample.points.size(); ++j) EXPECT_NE(sample.points[i], sample.points[j]);
}

TEST(SecantRank, ThreeByThreeMatrices) {
    const auto r = secant_rank(make_spec({2, 2}, {1, 1}), 2, 0);
    EXPECT_EQ(r.expected_affine_rank, 9u);
    EXPECT_EQ(r.measured_rank, frozen::kRank33Matrices_h2);
    EXPECT_EQ(r.defect, 1u);
    EXPECT_EQ(r.attempts, 1 + kDefectRetries);
}

TEST(SecantRank, VeroneseSurface) {
    const auto r = secant_rank(make_spec({2}, {2}), 2, 0);
    EXPECT_EQ(r.expected_affine_rank, 6u);
    EXPECT_EQ(r.measured_rank, frozen::kRankVeroneseSurface_h2);
    EXPECT_EQ(r.defect, 1u);
}

TEST(SecantRank, SinglePointIsSmooth) {
    for (const SVSpec& s : {make_spec({1}, {3}), make_spec({2, 1}, {2, 3}), make_spec({1, 1, 1}, {1, 1, 1})}) {
        const auto r = secant_rank(s, 1, 5);
        EXPECT_EQ(r.measured_rank, static_cast<std::size_t>(s.dim()) + 1);
        EXPECT_EQ(r.defect, 0u);
        EXPECT_EQ(r.attempts, 1);
    }
}

TEST(DefectivityScan, TwistedCubic) {
    const auto scan = defectivity_scan(make_spec({1}, {3}), 0);
    ASSERT_EQ(scan.size(), 2u);
    EXPECT_EQ(scan[0].measured_rank, frozen::kRankTwistedCubic_h1);
    EXPECT_EQ(scan[1].measured_rank, frozen::kRankTwistedCubic_h2);
    EXPECT_EQ(scan[1].defect, 0u);
}

TEST(DefectivityScan, FlagshipIsDefectFree) {
    const auto scan = defectivity_scan(make_spec({1, 1}, {3, 5}), 0);
    ASSERT_EQ(scan.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_EQ(scan[k].measured_rank, frozen::kRankFlagship[k]);
        EXPECT_EQ(scan[k].defect, 0u);
    }
}

TEST(DefectivityScan, MonotoneWithBoundedSteps) {
    for (const SVSpec& s : {make_spec({2, 2}, {1, 1}), make_spec({1, 1}, {3, 3}), make_spec({2}, {4}),
                            make_spec({1, 1, 1}, {1, 1, 2})}) {
        const auto scan = defectivity_scan(s, 3);
        std::size_t prev = 0;
        for (const auto& r : scan) {
            EXPECT_GE(r.measured_rank, prev);
            EXPECT_LE(r.measured_rank - prev, static_cast<std::size_t>(s.dim()) + 1);
            EXPECT_LE(r.measured_rank, r.expected_affine_rank);
            prev = r.measured_rank;
        }
    }
}

TEST(DefectivityScan, FloatModeAgreesWithExact) {
    for (const SVSpec& s : {make_spec({2, 2}, {1, 1}), make_spec({1, 1}, {3, 5}), make_spec({2}, {2})}) {
        const auto exact = defectivity_scan(s, 1, Mode::Exact);
        const auto fl = defectivity_scan(s, 1, Mode::Float);
        ASSERT_EQ(exact.size(), fl.size());
        for (std::size_t k = 0; k < exact.size(); ++k) EXPECT_EQ(exact[k].measured_rank, fl[k].measured_rank);
    }
}

TEST(TangentialSystem, FlagshipAtSeven) {
    const SVSpec s = make_spec({1, 1}, {3, 5});
    const auto sample = sample_points(s, 7, 11);
    const auto sys = tangential_system<mpq_class>(s, sample);
    EXPECT_EQ(sys.count(), 24u - frozen::kRankFlagship[6]);
    EXPECT_EQ(sys.measured_rank, frozen::kRankFlagship[6]);

    // Every form annihilates every frame row exactly.
    const auto product = stacked_frames(Embedding<mpq_class>(s), sample) * sys.forms.transpose();
    for (std::size_t i = 0; i < product.rows(); ++i)
        for (std::size_t j = 0; j < product.cols(); ++j) EXPECT_EQ(product(i, j), 0);
}

TEST(TangentialSystem, FullSpanAtGenericRankOfPerfectFormat) {
    const SVSpec s = make_spec({1, 1}, {3, 5});
    try {
        tangential_system<mpq_class>(s, sample_points(s, 8, 0));
        FAIL() << "expected FullSpan";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FullSpan);
    }
}

TEST(TangentialSystem, PerfectDefectFreeLeavesDimPlusOneForms) {
    for (const SVSpec& s : {make_spec({1, 1}, {3, 5}), make_spec({1, 1, 1}, {1, 1, 1}), make_spec({1}, {3})}) {
        const auto p = rank_profile(s);
        ASSERT_TRUE(p.perfect);
        const int g = static_cast<int>(p.generic_rank.get_si());
        const auto sys = tangential_system<mpq_class>(s, sample_points(s, g - 1, 2));
        EXPECT_EQ(sys.count(), static_cast<std::size_t>(s.dim()) + 1) << to_string(s);
    }
}

TEST(TangentialSystem, RestrictionMatchesLargerSample) {
    const SVSpec s = make_spec({1, 1}, {3, 5});
    const auto sample = sample_points(s, 7, 4);
    const auto small = tangential_system<mpq_class>(s, sample.prefix(5));
    PointSample extra{sample.seed, 2, {sample.points[5], sample.points[6]}};
    const auto restricted = restrict_system(s, small, extra);
    const auto direct = tangential_system<mpq_class>(s, sample);
    EXPECT_EQ(restricted.count(), direct.count());
    Matrix<mpq_class> both = restricted.forms;
    both.append_rows(direct.forms);
    EXPECT_EQ(rank(both), direct.count());
}

// The forms vanishing on a span of s independent points form a subspace of
// codimension exactly s = dim<L> + 1 (a linear space meets the bound).
TEST(SpanCodimension, LinearSpansMeetTheBound) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> coord(-50, 50);
    for (int instance = 0; instance < 20; ++instance) {
        const std::size_t ambient = 6 + static_cast<std::size_t>(instance % 5);
        const std::size_t points = 1 + static_cast<std::size_t>(instance) % (ambient - 1);
        Matrix<mpq_class> span(points, ambient);
        for (std::size_t i = 0; i < points; ++i)
            for (std::size_t j = 0; j < ambient; ++j) span(i, j) = coord(rng);
        const std::size_t projective_dim = rank(span) - 1;
        const auto forms = null_space(span);
        EXPECT_EQ(ambient - forms.rows(), projective_dim + 1);
    }
}

// A non-linear curve (twisted cubic through its monomial points) spans more
// than its dimension predicts.
TEST(SpanCodimension, NonLinearCurveExceedsTheBound) {
    const SVSpec s = make_spec({1}, {3});
    const Embedding<mpq_class> emb(s);
    Matrix<mpq_class> pts;
    for (long t : {1, 2, 3, 4, 5}) pts.append_row(std::span<const mpq_class>(emb.embed({{mpq_class(1), mpq_class(t)}})));
    const auto forms = null_space(pts);
    EXPECT_GT(emb.ambient_size() - forms.rows(), 1u + 1u);
}
