#pragma once

// Elementary number theory on machine integers: primality, modular powers,
// Legendre symbols, primitive roots, p-adic valuations of big rationals.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cyclodet {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Thrown when an exact-arithmetic invariant is violated (e.g. a division that
/// should have been exact was not). Always indicates a bug or a violated
/// hypothesis, never bad user input.
class ArithmeticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::int64_t mod_floor(std::int64_t a, std::int64_t n) {
    std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1U) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    if (n % 3 == 0) return n == 3;
    for (std::int64_t d = 5; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

inline bool is_odd_prime(std::int64_t n) { return n > 2 && is_prime(n); }

inline void require_odd_prime(std::int64_t p, const char* where) {
    if (!is_odd_prime(p)) {
        throw std::invalid_argument(std::string(where) + ": " + std::to_string(p) +
                                    " is not an odd prime");
    }
}

/// Legendre symbol (a/p) by Euler's criterion.
inline int legendre(std::int64_t a, std::int64_t p) {
    const auto r = static_cast<std::uint64_t>(mod_floor(a, p));
    if (r == 0) return 0;
    const auto e = pow_mod(r, static_cast<std::uint64_t>((p - 1) / 2), static_cast<std::uint64_t>(p));
    return e == 1 ? 1 : -1;
}

inline std::int64_t least_nonresidue(std::int64_t p) {
    require_odd_prime(p, "least_nonresidue");
    for (std::int64_t d = 2; d < p; ++d) {
        if (legendre(d, p) == -1) return d;
    }
    throw ArithmeticError("least_nonresidue: none found");
}

/// The first `count` quadratic non-residues in (0, p), ascending.
inline std::vector<std::int64_t> nonresidues(std::int64_t p, std::size_t count) {
    std::vector<std::int64_t> out;
    for (std::int64_t d = 2; d < p && out.size() < count; ++d) {
        if (legendre(d, p) == -1) out.push_back(d);
    }
    return out;
}

inline std::int64_t least_primitive_root(std::int64_t p) {
    require_odd_prime(p, "least_primitive_root");
    std::int64_t phi = p - 1;
    std::vector<std::int64_t> factors;
    std::int64_t n = phi;
    for (std::int64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            factors.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) factors.push_back(n);
    for (std::int64_t g = 2; g < p; ++g) {
        bool ok = true;
        for (auto f : factors) {
            if (pow_mod(static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(phi / f),
                        static_cast<std::uint64_t>(p)) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw ArithmeticError("least_primitive_root: none found");
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        auto t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Inverse of a modulo m (gcd(a, m) = 1 assumed).
inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, new_t = 1;
    auto r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
    while (new_r != 0) {
        auto q = r / new_r;
        auto tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw ArithmeticError("inv_mod: not invertible");
    return static_cast<std::uint64_t>(mod_floor(t, static_cast<std::int64_t>(m)));
}

/// nu_p of a nonzero big integer.
inline std::int64_t padic_val_int(const BigInt& n, std::int64_t p) {
    if (n == 0) throw std::invalid_argument("padic_val_int: zero");
    BigInt x = abs(n);
    std::int64_t v = 0;
    const auto up = static_cast<unsigned long>(p);
    while (mpz_divisible_ui_p(x.get_mpz_t(), up) != 0) {
        mpz_divexact_ui(x.get_mpz_t(), x.get_mpz_t(), up);
        ++v;
    }
    return v;
}

/// p-adic valuation of a rational; std::nullopt stands for +infinity (x = 0).
inline std::optional<std::int64_t> padic_val(const Rational& x, std::int64_t p) {
    if (x == 0) return std::nullopt;
    return padic_val_int(x.get_num(), p) - padic_val_int(x.get_den(), p);
}

inline BigInt big_pow(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }
inline std::string to_string(const BigInt& r) { return r.get_str(); }

}  // namespace cyclodet
