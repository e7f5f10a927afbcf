#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "svident/embedding.hpp"

using namespace svident;

namespace {

using Q = mpq_class;

Point<Q> qpoint(std::vector<std::vector<long>> coords) {
    Point<Q> p;
    for (auto& f : coords) {
        FactorPoint<Q> x;
        for (long c : f) x.push_back(Q(c));
        p.push_back(x);
    }
    return p;
}

const std::vector<SVSpec> kSmallSpecs{
    {{1}, {3}}, {{2}, {2}}, {{1, 1}, {3, 5}}, {{2, 2}, {1, 1}}, {{1, 1, 1}, {1, 1, 1}}, {{1, 2}, {2, 3}}, {{3}, {4}},
};

/// Chart coordinates k/1000 in [1, 2], chart coordinate 1.
Point<Q> random_rational_point(const SVSpec& s, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> coord(1000, 2000);
    Point<Q> p;
    for (int n : s.n) {
        FactorPoint<Q> x{Q(1)};
        for (int j = 0; j < n; ++j) x.push_back(Q(coord(rng), 1000));
        p.push_back(x);
    }
    return p;
}

template <typename T>
Point<T> convert(const Point<Q>& p) {
    Point<T> out;
    for (const auto& f : p) {
        FactorPoint<T> x;
        for (const auto& c : f) x.push_back(static_cast<T>(c.get_d()));
        out.push_back(x);
    }
    return out;
}

} // namespace

TEST(CoordinateBasis, Examples) {
    const auto conic = coordinate_basis(make_spec({1}, {2}));
    ASSERT_EQ(conic.size(), 3u);
    EXPECT_EQ(conic[0], (ExponentIndex{{2, 0}}));
    EXPECT_EQ(conic[1], (ExponentIndex{{1, 1}}));
    EXPECT_EQ(conic[2], (ExponentIndex{{0, 2}}));

    const auto segre = coordinate_basis(make_spec({1, 1}, {1, 1}));
    ASSERT_EQ(segre.size(), 4u);
    EXPECT_EQ(segre[0], (ExponentIndex{{1, 0}, {1, 0}}));
    EXPECT_EQ(segre[1], (ExponentIndex{{1, 0}, {0, 1}}));
    EXPECT_EQ(segre[2], (ExponentIndex{{0, 1}, {1, 0}}));
    EXPECT_EQ(segre[3], (ExponentIndex{{0, 1}, {0, 1}}));

    EXPECT_EQ(coordinate_basis(make_spec({2}, {1})).size(), 3u);
}

TEST(CoordinateBasis, SizeAndDegreeInvariants) {
    for (const auto& s : kSmallSpecs) {
        const auto basis = coordinate_basis(s);
        EXPECT_EQ(basis.size(), ambient_size(s));
        for (const auto& idx : basis)
            for (std::size_t i = 0; i < s.factors(); ++i) {
                int sum = 0;
                for (int e : idx[i]) sum += e;
                EXPECT_EQ(sum, s.d[i]);
            }
    }
}

TEST(AmbientSize, RejectsHugeFormats) { EXPECT_THROW(ambient_size(make_spec({10, 10}, {10, 10})), Error); }

TEST(Embed, RationalNormalCurveChart) {
    const auto v = embed(make_spec({1}, {2}), qpoint({{1, 7}}));
    EXPECT_EQ(v, (std::vector<Q>{1, 7, 49}));
}

TEST(Embed, SegreOuterProduct) {
    const auto v = embed(make_spec({1, 1}, {1, 1}), qpoint({{1, 3}, {1, 5}}));
    EXPECT_EQ(v, (std::vector<Q>{1, 5, 3, 15}));
}

TEST(Embed, RejectsZeroFactor) {
    EXPECT_THROW(embed(make_spec({1, 1}, {1, 1}), qpoint({{1, 3}, {0, 0}})), Error);
    try {
        embed(make_spec({1}, {2}), qpoint({{0, 0}}));
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroPoint);
    }
}

TEST(EmbedProperties, HomogeneityAndMultiplicativity) {
    std::mt19937_64 rng(3);
    for (const auto& s : kSmallSpecs) {
        const Embedding<Q> emb(s);
        const auto p = random_rational_point(s, rng);
        const auto base = emb.embed(p);
        for (std::size_t i = 0; i < s.factors(); ++i) {
            const Q lambda(-3, 2);
            auto scaled = p;
            for (auto& c : scaled[i]) c *= lambda;
            auto expected = base;
            Q factor = 1;
            for (int k = 0; k < s.d[i]; ++k) factor *= lambda;
            for (auto& c : expected) c *= factor;
            EXPECT_EQ(emb.embed(scaled), expected);
        }
        // Outer product of the per-factor Veronese embeddings.
        std::vector<Q> outer{1};
        for (std::size_t i = 0; i < s.factors(); ++i) {
            const auto part = embed(SVSpec{{s.n[i]}, {s.d[i]}}, Point<Q>{p[i]});
            std::vector<Q> next;
            for (const auto& a : outer)
                for (const auto& b : part) next.push_back(a * b);
            outer = next;
        }
        EXPECT_EQ(base, outer);
    }
}

TEST(TangentFrame, VeroneseCurve) {
    const auto f = tangent_frame(make_spec({1}, {2}), qpoint({{1, 4}}));
    ASSERT_EQ(f.rows(), 2u);
    EXPECT_EQ(std::vector<Q>(f.row(0).begin(), f.row(0).end()), (std::vector<Q>{1, 4, 16}));
    EXPECT_EQ(std::vector<Q>(f.row(1).begin(), f.row(1).end()), (std::vector<Q>{0, 1, 8}));
    EXPECT_EQ(rank(f), 2u);
}

TEST(TangentFrame, SegreChartAtOrigin) {
    const auto f = tangent_frame(make_spec({1, 1}, {1, 1}), qpoint({{1, 0}, {1, 0}}));
    Matrix<Q> expected(3, 4);
    expected(0, 0) = 1;
    expected(1, 2) = 1;
    expected(2, 1) = 1;
    EXPECT_EQ(f, expected);
    EXPECT_EQ(rank(f), 3u);
}

TEST(TangentFrame, FullRankAtGenericPoints) {
    std::mt19937_64 rng(9);
    for (const auto& s : kSmallSpecs) {
        const auto f = tangent_frame(s, random_rational_point(s, rng));
        EXPECT_EQ(rank(f), static_cast<std::size_t>(s.dim()) + 1) << to_string(s);
    }
}

TEST(TangentFrame, MatchesCentralDifferences) {
    std::mt19937_64 rng(21);
    const double step = 1e-4;
    for (const auto& s : kSmallSpecs) {
        const Embedding<long double> emb(s);
        const auto p = convert<long double>(random_rational_point(s, rng));
        const auto frame = emb.tangent_frame(p);
        for (int u = 0; u < emb.dim(); ++u) {
            const auto [i, j] = emb.chart_direction(u);
            auto plus = p, minus = p;
            plus[i][static_cast<std::size_t>(j)] += step;
            minus[i][static_cast<std::size_t>(j)] -= step;
            const auto fp = emb.embed(plus), fm = emb.embed(minus);
            for (std::size_t k = 0; k < emb.ambient_size(); ++k) {
                const long double fd = (fp[k] - fm[k]) / (2 * step);
                const long double exact = frame(static_cast<std::size_t>(u) + 1, k);
                EXPECT_LE(std::fabs(static_cast<double>(fd - exact)), 1e-5 * (1 + std::fabs(static_cast<double>(exact))));
            }
        }
    }
}

TEST(Hessian, SquareOfChartCoordinate) {
    const SVSpec s = make_spec({1}, {2});
    const std::vector<Q> form{0, 0, 1}; // dual to t^2
    const auto h = hessian(s, qpoint({{1, 0}}), std::span<const Q>(form));
    ASSERT_EQ(h.rows(), 1u);
    EXPECT_EQ(h(0, 0), 2);
}

TEST(Hessian, LinearInTheForm) {
    const SVSpec s = make_spec({2}, {2});
    const Embedding<Q> emb(s);
    const auto p = qpoint({{1, 2, -3}});
    const auto forms = null_space(emb.tangent_frame(p));
    ASSERT_EQ(forms.rows(), 3u);
    const std::vector<Q> form(forms.row(0).begin(), forms.row(0).end());
    const auto h = emb.hessian(p, form);

    std::vector<Q> zero(form.size(), Q(0));
    EXPECT_EQ(emb.hessian(p, zero), Matrix<Q>(2, 2));

    auto scaled = form;
    for (auto& c : scaled) c *= Q(-5, 3);
    const auto hs = emb.hessian(p, scaled);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
            EXPECT_EQ(hs(a, b), h(a, b) * Q(-5, 3));
            EXPECT_EQ(h(a, b), h(b, a));
        }
}

TEST(Hessian, RejectsFormsNotSingularAtThePoint) {
    const SVSpec s = make_spec({1}, {2});
    const std::vector<Q> form{1, 0, 0};
    try {
        hessian(s, qpoint({{1, 0}}), std::span<const Q>(form));
        FAIL() << "expected PreconditionViolated";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
    }
    const std::vector<double> fform{1e-3, 0, 0};
    Point<double> p{{1.0, 0.0}};
    EXPECT_THROW(hessian(s, p, std::span<const double>(fform)), Error);
}

// Twenty random instances: float Hessian of a singular form against central
// second differences (step 1e-4) of the pulled-back form.
TEST(HessianProperties, MatchesCentralFiniteDifferences) {
    std::mt19937_64 rng(2024);
    const double step = 1e-4;
    for (int instance = 0; instance < 20; ++instance) {
        const SVSpec& s = kSmallSpecs[static_cast<std::size_t>(instance) % kSmallSpecs.size()];
        const auto pq = random_rational_point(s, rng);
        const auto forms = null_space(Embedding<Q>(s).tangent_frame(pq));
        ASSERT_GT(forms.rows(), 0u);

        // Random combination of the singular forms, normalized in double.
        std::uniform_int_distribution<int> coef(-9, 9);
        std::vector<Q> combo(forms.cols(), Q(0));
        for (std::size_t r = 0; r < forms.rows(); ++r) {
            const Q c(coef(rng));
            for (std::size_t k = 0; k < forms.cols(); ++k) combo[k] += c * forms(r, k);
        }
        double norm = 0;
        for (const auto& c : combo) norm += c.get_d() * c.get_d();
        norm = std::sqrt(norm);
        if (norm == 0) continue;
        std::vector<double> form;
        std::vector<long double> form_ld;
        for (const auto& c : combo) {
            form.push_back(c.get_d() / norm);
            form_ld.push_back(static_cast<long double>(c.get_d() / norm));
        }

        const auto h = Embedding<double>(s).hessian(convert<double>(pq), form);
        const Embedding<long double> emb(s);
        const auto p = convert<long double>(pq);
        auto f = [&](int u, double su, int v, double sv) {
            auto x = p;
            const auto [iu, ju] = emb.chart_direction(u);
            const auto [iv, jv] = emb.chart_direction(v);
            x[iu][static_cast<std::size_t>(ju)] += su;
            x[iv][static_cast<std::size_t>(jv)] += sv;
            return dot(form_ld, emb.embed(x));
        };

        double scale = 0;
        for (std::size_t a = 0; a < h.rows(); ++a)
            for (std::size_t b = 0; b < h.cols(); ++b) scale = std::max(scale, std::fabs(h(a, b)));
        ASSERT_GT(scale, 0.0);
        for (int u = 0; u < emb.dim(); ++u)
            for (int v = 0; v < emb.dim(); ++v) {
                const long double fd =
                    (f(u, step, v, step) - f(u, step, v, -step) - f(u, -step, v, step) + f(u, -step, v, -step)) /
                    (4.0L * step * step);
                const double err = std::fabs(static_cast<double>(fd) - h(static_cast<std::size_t>(u), static_cast<std::size_t>(v)));
                EXPECT_LE(err / scale, 1e-6) << to_string(s) << " u=" << u << " v=" << v;
            }
    }
}
