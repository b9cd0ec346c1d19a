#include <gtest/gtest.h>

#include "cyclodet/matrix.hpp"
#include "test_support.hpp"

namespace cyclodet {
namespace {

using testing::int_matrix;
using testing::legendre_by_squares;

CycElt z(std::int64_t p, std::int64_t e) { return CycElt::zeta_pow(p, e); }

TEST(BuildC, Examples) {
    const auto c3 = build_C(3);
    ASSERT_EQ(c3.size(), 1u);
    EXPECT_EQ(c3(0, 0), CycElt::one(3));
    const auto c5 = build_C(5);
    EXPECT_EQ(c5(0, 1), CycElt::one(5) + z(5, 1) + z(5, 2) + z(5, 3));
    // (j,k) = (2,3) at p = 7: (1 - z^36)/(1 - z^4) = (1 - z)/(1 - z^4).
    const auto c7 = build_C(7);
    EXPECT_EQ(c7(1, 2), exact_div(CycElt::one(7) - z(7, 1), CycElt::one(7) - z(7, 4)));
    for (const auto& e : c7.entries()) EXPECT_TRUE(e.is_integral());
}

TEST(BuildC, EntriesMatchFieldDivision) {
    for (std::int64_t p : {5, 7, 11, 13}) {
        const auto c = build_C(p);
        const auto one = CycElt::one(p);
        for (std::size_t j = 1; j <= c.size(); ++j)
            for (std::size_t k = 1; k <= c.size(); ++k) {
                const auto j2 = static_cast<std::int64_t>(j * j), k2 = static_cast<std::int64_t>(k * k);
                EXPECT_EQ(c(j - 1, k - 1), exact_div_euclid(one - z(p, j2 * k2), one - z(p, j2)));
            }
    }
}

TEST(BuildD, Examples) {
    const auto d = build_D(5);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d(1, 0), CycElt::one(5));
    EXPECT_EQ(d(1, 1), z(5, 1));
    EXPECT_EQ(d(1, 2), z(5, 4));
    for (std::int64_t p : {3, 7, 13}) {
        const auto dp = build_D(p);
        for (std::size_t k = 0; k < dp.size(); ++k) EXPECT_EQ(dp(0, k), CycElt::one(p));
    }
    EXPECT_EQ(build_D_delta(5, 2)(1, 1), z(5, 2));
    EXPECT_THROW(build_D_delta(5, 4), std::invalid_argument);
    EXPECT_THROW(build_D_delta(5, 10), std::invalid_argument);
}

TEST(BuildDTilde, Examples) {
    const auto d = build_D_tilde(7);
    for (std::size_t j = 0; j < d.size(); ++j) EXPECT_EQ(d(j, 0), CycElt::one(7));
    EXPECT_EQ(build_D_tilde(5)(1, 2), z(5, 4) * Rational(2));
    EXPECT_EQ(d(3, 3), z(7, 4) * Rational(2));
}

TEST(BuildEF, Examples) {
    const auto e = build_E(7);
    EXPECT_EQ(e(0, 0), -gauss_sum(7));
    EXPECT_EQ(e(1, 1), CycElt::constant(7, legendre_by_squares(2, 7)));
    EXPECT_EQ(e(1, 1), CycElt::one(7));
    const auto f = build_F(5, 2);
    EXPECT_EQ(f(0, 0), gauss_sum(5));
    EXPECT_EQ(f(1, 2), CycElt::constant(5, legendre_by_squares(9, 5)));
    EXPECT_THROW(build_E(5), std::invalid_argument);
    EXPECT_THROW(build_F(7, 3), std::invalid_argument);
    EXPECT_THROW(build_F(13, 3), std::invalid_argument);
}

TEST(BuildLegendreMatrices, Examples) {
    EXPECT_EQ(build_S(7), int_matrix({{1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}));
    EXPECT_EQ(build_T(5, 2), int_matrix({{0, -1, -1}, {1, -1, 1}, {1, 1, -1}}));
    EXPECT_EQ(build_S_delta(5, 2), int_matrix({{-1, 1}, {1, -1}}));
    EXPECT_THROW(build_T(7, 2), std::invalid_argument);
    EXPECT_THROW(build_S_delta(7, 4), std::invalid_argument);
}

TEST(BuildLegendreMatrices, AgreeWithSquaringOracle) {
    for (std::int64_t p = 3; p < 60; p += 2) {
        if (!is_prime(p)) continue;
        const auto s = build_S(p);
        const auto delta = least_nonresidue(p);
        const auto t = build_T(p, delta);
        for (std::size_t j = 0; j < t.size(); ++j)
            for (std::size_t k = 0; k < t.size(); ++k) {
                const auto jj = static_cast<std::int64_t>(j * j), kk = static_cast<std::int64_t>(k * k);
                ASSERT_EQ(t(j, k), legendre_by_squares(jj + delta * kk, p));
                if (j > 0 && k > 0) {
                    ASSERT_EQ(s(j - 1, k - 1), legendre_by_squares(jj + kk, p));
                }
            }
    }
}

TEST(MatrixInvariants, TBorderAndSymmetry) {
    for (std::int64_t p : {5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        const auto s = build_S(p);
        EXPECT_EQ(s, s.transpose()) << p;
        for (auto delta : nonresidues(p, 3)) {
            const auto t = build_T(p, delta);
            EXPECT_EQ(t(0, 0), 0);
            for (std::size_t k = 1; k < t.size(); ++k) {
                EXPECT_EQ(t(0, k), -1);
                EXPECT_EQ(t(k, 0), 1);
            }
            // S(Delta)^T = -S(Delta^{-1}).
            const auto inv = static_cast<std::int64_t>(inv_mod(static_cast<std::uint64_t>(delta),
                                                               static_cast<std::uint64_t>(p)));
            const auto sd = build_S_delta(p, delta);
            const auto sinv = build_S_delta(p, inv);
            for (std::size_t j = 0; j < sd.size(); ++j)
                for (std::size_t k = 0; k < sd.size(); ++k) ASSERT_EQ(sd(k, j), -sinv(j, k));
        }
    }
}

TEST(MatrixIdentities, DTildeTimesDIsGaussSumTimesE) {
    for (std::int64_t p = 3; p <= 31; p += 4) {
        if (!is_prime(p)) continue;
        const auto lhs = multiply(build_D_tilde(p), build_D(p));
        EXPECT_EQ(lhs, scale(build_E(p), gauss_sum(p))) << p;
    }
}

TEST(MatrixIdentities, DTildeTimesDDeltaIsGaussSumTimesF) {
    for (std::int64_t p = 5; p <= 29; p += 4) {
        if (!is_prime(p)) continue;
        for (auto delta : nonresidues(p, 3)) {
            const auto lhs = multiply(build_D_tilde(p), build_D_delta(p, delta));
            EXPECT_EQ(lhs, scale(build_F(p, delta), gauss_sum(p))) << p << " " << delta;
        }
    }
}

TEST(MatrixProduct, MatchesEntrywiseDefinition) {
    const auto a = build_C(7), b = build_C(7);
    const auto c = multiply(a, b);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) {
            CycElt acc = CycElt::zero(7);
            for (std::size_t k = 0; k < a.size(); ++k) acc += a(i, k) * b(k, j);
            EXPECT_EQ(c(i, j), acc);
        }
}

TEST(Families, NamesRoundTrip) {
    for (auto f : {Family::C, Family::D, Family::DDelta, Family::DTilde, Family::E, Family::F, Family::S,
                   Family::T, Family::SDelta}) {
        EXPECT_EQ(parse_family(family_name(f)), f);
    }
    EXPECT_FALSE(parse_family("Q").has_value());
}

}  // namespace
}  // namespace cyclodet
