#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cyclodet/cycring.hpp"

namespace cyclodet::testing {

inline constexpr std::uint64_t kSeed = 20190611;

/// Random element of Q(zeta_p) with small coefficients; integral unless
/// `rational` is set.
inline CycElt random_elt(std::mt19937_64& rng, std::int64_t p, bool rational = false, int span = 5) {
    std::uniform_int_distribution<int> coef(-span, span);
    std::uniform_int_distribution<int> den(1, 4);
    std::vector<Rational> c(static_cast<std::size_t>(p - 1));
    for (auto& x : c) {
        x = coef(rng);
        if (rational) {
            x /= den(rng);
            x.canonicalize();
        }
    }
    return CycElt::from_coeffs(p, std::move(c));
}

inline CycElt random_nonzero(std::mt19937_64& rng, std::int64_t p, bool rational = false) {
    for (;;) {
        auto x = random_elt(rng, p, rational);
        if (!x.is_zero()) return x;
    }
}

inline std::int64_t random_prime(std::mt19937_64& rng) {
    static const std::int64_t primes[] = {3, 5, 7, 11, 13, 17, 19, 23};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(primes) - 1);
    return primes[pick(rng)];
}

inline CycElt elt(std::int64_t p, std::initializer_list<long> coeffs) {
    std::vector<Rational> c(static_cast<std::size_t>(p - 1));
    std::size_t i = 0;
    for (auto v : coeffs) c[i++] = v;
    return CycElt::from_coeffs(p, std::move(c));
}

}  // namespace cyclodet::testing

#include "cyclodet/matrix.hpp"

namespace cyclodet::testing {

/// Laplace expansion along the first row; independent of every elimination
/// path in the library. Exponential cost, small matrices only.
template <class T>
T cofactor_det(const Matrix<T>& m, const T& one) {
    const auto n = m.size();
    if (n == 0) return one;
    if (n == 1) return m(0, 0);
    T acc = one;
    acc -= one;
    for (std::size_t c = 0; c < n; ++c) {
        Matrix<T> minor(n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0, jj = 0; j < n; ++j) {
                if (j == c) continue;
                minor(i - 1, jj++) = m(i, j);
            }
        T term = m(0, c) * cofactor_det(minor, one);
        if (c % 2 == 0) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    return acc;
}

/// Quadratic residues by squaring, for oracles that must not use Euler's criterion.
inline int legendre_by_squares(std::int64_t a, std::int64_t p) {
    a = ((a % p) + p) % p;
    if (a == 0) return 0;
    for (std::int64_t x = 1; x < p; ++x) {
        if ((x * x) % p == a) return 1;
    }
    return -1;
}

inline IntMatrix int_matrix(std::initializer_list<std::initializer_list<long>> rows) {
    IntMatrix m(rows.size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (auto v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace cyclodet::testing
