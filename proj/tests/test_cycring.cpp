#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cyclodet/cycring.hpp"
#include "test_support.hpp"

namespace cyclodet {
namespace {

using testing::elt;
using testing::kSeed;
using testing::random_elt;
using testing::random_nonzero;
using testing::random_prime;

CycElt z(std::int64_t p, std::int64_t e) { return CycElt::zeta_pow(p, e); }
CycElt one(std::int64_t p) { return CycElt::one(p); }

TEST(CycMake, EliminatesTopPower) {
    std::vector<Rational> raw{0, 0, 0, 0, 1};
    EXPECT_EQ(CycElt::make(5, raw), elt(5, {-1, -1, -1, -1}));
    raw = {1, 0, 0, 0, 0};
    EXPECT_EQ(CycElt::make(5, raw), elt(5, {1, 0, 0, 0}));
    raw = {0, 1, 1};
    EXPECT_EQ(CycElt::make(3, raw), elt(3, {-1, 0}));
}

TEST(CycMake, RejectsBadInput) {
    std::vector<Rational> raw(9);
    EXPECT_THROW(CycElt::make(9, raw), std::invalid_argument);
    raw.resize(4);
    EXPECT_THROW(CycElt::make(5, raw), std::invalid_argument);
    EXPECT_THROW(CycElt::zero(2), std::invalid_argument);
}

TEST(CycMul, Examples) {
    EXPECT_EQ((one(3) + z(3, 1)) * (one(3) + z(3, 1)), z(3, 1));
    EXPECT_EQ(z(5, 2) * z(5, 4), z(5, 1));
    EXPECT_EQ((one(7) - z(7, 1)) * (one(7) + z(7, 1) + z(7, 2)), one(7) - z(7, 3));
    EXPECT_THROW(z(5, 1) * z(7, 1), std::invalid_argument);
}

TEST(CycMul, RationalCoefficients) {
    const auto half = CycElt::constant(5, Rational(1, 2));
    EXPECT_EQ(half * z(5, 3) * Rational(2), z(5, 3));
    EXPECT_FALSE((half * z(5, 1)).is_integral());
}

TEST(CycGalois, Examples) {
    EXPECT_EQ(galois(2, z(5, 1) + z(5, 4)), z(5, 2) + z(5, 3));
    std::mt19937_64 rng(kSeed);
    const auto x = random_elt(rng, 7);
    EXPECT_EQ(galois(1, x), x);
    EXPECT_EQ(galois(2, galois(2, z(5, 1))), z(5, 4));
    EXPECT_EQ(galois(4, z(5, 1)), z(5, 4));
    EXPECT_THROW(galois(10, z(5, 1)), std::invalid_argument);
}

TEST(CycExactDiv, Examples) {
    EXPECT_EQ(exact_div(one(5) - z(5, 4), one(5) - z(5, 1)), one(5) + z(5, 1) + z(5, 2) + z(5, 3));
    EXPECT_EQ(exact_div(one(7) - z(7, 4), one(7) - z(7, 2)), one(7) + z(7, 2));
    std::mt19937_64 rng(kSeed + 1);
    const auto x = random_nonzero(rng, 11);
    EXPECT_EQ(exact_div(x, x), one(11));
    EXPECT_THROW(exact_div(x, CycElt::zero(11)), std::domain_error);
}

TEST(CycExactDiv, EuclidPathMatches) {
    EXPECT_EQ(exact_div_euclid(one(5) - z(5, 4), one(5) - z(5, 1)), one(5) + z(5, 1) + z(5, 2) + z(5, 3));
    EXPECT_EQ(exact_div_euclid(one(7) - z(7, 4), one(7) - z(7, 2)), one(7) + z(7, 2));
}

TEST(CycExactDiv, NonIntegralQuotientFallsBackToField) {
    // 1/(1 - z) is not in Z[z]: (1 - z) has norm p.
    const auto q = exact_div(one(7), one(7) - z(7, 1));
    EXPECT_FALSE(q.is_integral());
    EXPECT_EQ(q * (one(7) - z(7, 1)), one(7));
}

TEST(CycInverse, UnitsHaveIntegralInverses) {
    // (1 - z^2)/(1 - z) = 1 + z is a cyclotomic unit.
    const auto u = one(11) + z(11, 1);
    const auto inv = inverse(u);
    EXPECT_TRUE(inv.is_integral());
    EXPECT_EQ(inv * u, one(11));
    EXPECT_THROW(inverse(CycElt::zero(11)), std::domain_error);
}

TEST(CycGeometricQuotient, Examples) {
    EXPECT_EQ(geometric_quotient(7, 1, 4), one(7) + z(7, 1) + z(7, 2) + z(7, 3));
    EXPECT_EQ(geometric_quotient(5, 3, 1), one(5));
    EXPECT_EQ(geometric_quotient(5, 1, 5), CycElt::zero(5));
    EXPECT_THROW(geometric_quotient(5, 10, 3), std::invalid_argument);
    EXPECT_THROW(geometric_quotient(5, 1, 0), std::invalid_argument);
}

TEST(CycGeometricQuotient, AgreesWithDivisionForAllSmallArguments) {
    for (std::int64_t p : {3, 5, 7, 11, 13}) {
        for (std::int64_t e = 1; e < p; ++e) {
            for (std::int64_t n = 1; n < p; ++n) {
                const auto g = geometric_quotient(p, e, n);
                EXPECT_EQ(g * (one(p) - z(p, e)), one(p) - z(p, e * n)) << p << " " << e << " " << n;
            }
        }
    }
}

TEST(CycEvalComplex, Examples) {
    const long double pi = std::numbers::pi_v<long double>;
    auto v = eval_complex(z(5, 1) + z(5, 4));
    EXPECT_NEAR(static_cast<double>(v.re), static_cast<double>(2 * std::cos(2 * pi / 5)), 1e-15);
    EXPECT_NEAR(static_cast<double>(v.im), 0.0, 1e-15);
    EXPECT_LT(v.error_bound, 1e-15L);
    v = eval_complex(one(13));
    EXPECT_EQ(v.re, 1.0L);
    EXPECT_NEAR(static_cast<double>(v.im), 0.0, 1e-18);
    v = eval_complex(z(3, 1) - z(3, 2));
    EXPECT_NEAR(static_cast<double>(v.re), 0.0, 1e-15);
    EXPECT_NEAR(static_cast<double>(v.im), 1.7320508075688772, 1e-15);
    EXPECT_THROW(eval_complex(one(5), 10), std::invalid_argument);
}

TEST(CycEvalMod, Examples) {
    EXPECT_EQ(eval_mod(z(5, 1), 11, 3), 3u);
    EXPECT_EQ(eval_mod(CycElt::zero(5), 11, 3), 0u);
    std::vector<Rational> raw{1, 1, 1, 1, 1};
    EXPECT_EQ(eval_mod(CycElt::make(5, raw), 11, 3), 0u);
    EXPECT_THROW(eval_mod(z(5, 1), 11, 1), std::invalid_argument);
    EXPECT_THROW(eval_mod(z(5, 1), 11, 10), std::invalid_argument);
    EXPECT_THROW(eval_mod(z(5, 1), 13, 3), std::invalid_argument);
    EXPECT_THROW(eval_mod(CycElt::constant(5, Rational(1, 2)), 11, 3), std::invalid_argument);
}

TEST(CycProperties, RingAxiomsAndComplexConsistency) {
    std::mt19937_64 rng(kSeed);
    for (int iter = 0; iter < 500; ++iter) {
        const auto p = random_prime(rng);
        const bool rational = iter % 3 == 0;
        const auto x = random_elt(rng, p, rational);
        const auto y = random_elt(rng, p, rational);
        const auto w = random_elt(rng, p);
        ASSERT_EQ(x * y, y * x);
        ASSERT_EQ((x * y) * w, x * (y * w));
        ASSERT_EQ(x * (y + w), x * y + x * w);
        ASSERT_EQ(x + y - y, x);

        const auto ex = eval_complex(x), ey = eval_complex(y), exy = eval_complex(x * y);
        const std::complex<long double> prod = std::complex<long double>(ex.re, ex.im) *
                                               std::complex<long double>(ey.re, ey.im);
        ASSERT_NEAR(static_cast<double>(prod.real()), static_cast<double>(exy.re), 1e-9);
        ASSERT_NEAR(static_cast<double>(prod.imag()), static_cast<double>(exy.im), 1e-9);
    }
}

TEST(CycProperties, GaloisIsAHomomorphismAndComposes) {
    std::mt19937_64 rng(kSeed + 2);
    for (int iter = 0; iter < 500; ++iter) {
        const auto p = random_prime(rng);
        std::uniform_int_distribution<std::int64_t> unit(1, p - 1);
        const auto a = unit(rng), b = unit(rng);
        const auto x = random_elt(rng, p, iter % 2 == 0);
        const auto y = random_elt(rng, p);
        ASSERT_EQ(galois(a, galois(b, x)), galois((a * b) % p, x));
        ASSERT_EQ(galois(a, x * y), galois(a, x) * galois(a, y));
        ASSERT_EQ(galois(a, x + y), galois(a, x) + galois(a, y));
    }
}

TEST(CycProperties, ExactDivRoundTrip) {
    std::mt19937_64 rng(kSeed + 3);
    for (int iter = 0; iter < 500; ++iter) {
        const auto p = random_prime(rng);
        const bool rational = iter % 4 == 0;
        const auto x = random_elt(rng, p, rational);
        const auto y = random_nonzero(rng, p, rational);
        ASSERT_EQ(exact_div(x * y, y), x);
    }
}

TEST(CycProperties, EuclidAndModularQuotientsAgree) {
    std::mt19937_64 rng(kSeed + 4);
    for (int iter = 0; iter < 60; ++iter) {
        const auto p = random_prime(rng);
        const auto x = random_elt(rng, p);
        const auto y = random_nonzero(rng, p);
        ASSERT_EQ(exact_div_euclid(x * y, y), x);
        auto q = detail::modular_quotient(x * y, y);
        ASSERT_TRUE(q.has_value());
        ASSERT_EQ(*q, x);
    }
}

TEST(CycProperties, EvalModIsARingHomomorphism) {
    std::mt19937_64 rng(kSeed + 5);
    for (int iter = 0; iter < 200; ++iter) {
        const auto p = random_prime(rng);
        const auto& aux = modular::aux_prime(p, static_cast<std::size_t>(iter % 3));
        const auto x = random_elt(rng, p, false, 1000);
        const auto y = random_elt(rng, p, false, 1000);
        const auto q = aux.q, r = aux.root;
        ASSERT_EQ(eval_mod(x * y, q, r), mul_mod(eval_mod(x, q, r), eval_mod(y, q, r), q));
        ASSERT_EQ(eval_mod(x + y, q, r), (eval_mod(x, q, r) + eval_mod(y, q, r)) % q);
    }
}

TEST(CycModular, InterpolationInvertsEvaluation) {
    std::mt19937_64 rng(kSeed + 6);
    for (std::int64_t p : {3, 5, 7, 29}) {
        const auto& aux = modular::aux_prime(p, 0);
        std::uniform_int_distribution<modular::Residue> res(0, aux.q - 1);
        std::vector<modular::Residue> c(static_cast<std::size_t>(p - 1));
        for (auto& v : c) v = res(rng);
        EXPECT_EQ(modular::interpolate(modular::eval_at_roots(c, aux), aux), c);
    }
}

TEST(CycModular, AuxPrimesAreAboveFloorAndCongruent) {
    for (std::int64_t p : {3, 7, 97}) {
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& aux = modular::aux_prime(p, i);
            EXPECT_GT(aux.q, modular::kAuxPrimeFloor);
            EXPECT_EQ(aux.q % static_cast<modular::Residue>(p), 1u);
            EXPECT_TRUE(is_prime(static_cast<std::int64_t>(aux.q)));
            if (i > 0) {
                EXPECT_GT(aux.q, modular::aux_prime(p, i - 1).q);
            }
        }
    }
}

TEST(NumberTheory, PadicValuation) {
    EXPECT_EQ(padic_val(Rational(7, 2), 7), 1);
    EXPECT_EQ(padic_val(Rational(1, 2), 7), 0);
    EXPECT_EQ(padic_val(Rational(2, 49), 7), -2);
    EXPECT_FALSE(padic_val(Rational(0), 7).has_value());
}

TEST(NumberTheory, LegendreAndRoots) {
    EXPECT_EQ(legendre(2, 7), 1);
    EXPECT_EQ(legendre(3, 7), -1);
    EXPECT_EQ(legendre(14, 7), 0);
    EXPECT_EQ(least_nonresidue(7), 3);
    EXPECT_EQ(least_nonresidue(17), 3);
    EXPECT_EQ(least_primitive_root(7), 3);
    EXPECT_EQ(least_primitive_root(41), 6);
}

}  // namespace
}  // namespace cyclodet
