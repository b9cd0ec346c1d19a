#pragma once

// Dense square matrices over BigInt or CycElt, and constructors for every
// matrix family attached to an odd prime p:
//
//   C      ((1 - z^{j^2 k^2}) / (1 - z^{j^2}))     1 <= j,k <= m
//   D      (z^{j^2 k^2})                           0 <= j,k <= m
//   DDelta (z^{Delta j^2 k^2})                     0 <= j,k <= m
//   DTilde 1 in column 0, 2 z^{j^2 k^2} elsewhere  0 <= j,k <= m
//   E      (-g at (0,0), ((j^2+k^2)/p) elsewhere)  0 <= j,k <= m, p = 3 mod 4
//   F      (g at (0,0), ((j^2+Delta k^2)/p))       0 <= j,k <= m, p = 1 mod 4
//   S      ((j^2+k^2)/p)                           1 <= j,k <= m
//   T      ((j^2+Delta k^2)/p)                     0 <= j,k <= m
//   SDelta ((j^2+Delta k^2)/p)                     1 <= j,k <= m
//
// with m = (p-1)/2, z = zeta_p and g the quadratic Gauss sum.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cyclodet/cycring.hpp"
#include "cyclodet/subfield.hpp"

namespace cyclodet {

enum class Family { C, D, DDelta, DTilde, E, F, S, T, SDelta };

inline std::string_view family_name(Family f) {
    switch (f) {
        case Family::C: return "C";
        case Family::D: return "D";
        case Family::DDelta: return "DD";
        case Family::DTilde: return "Dtilde";
        case Family::E: return "E";
        case Family::F: return "F";
        case Family::S: return "S";
        case Family::T: return "T";
        case Family::SDelta: return "SD";
    }
    return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
    for (auto f : {Family::C, Family::D, Family::DDelta, Family::DTilde, Family::E, Family::F, Family::S,
                   Family::T, Family::SDelta}) {
        if (family_name(f) == s) return f;
    }
    return std::nullopt;
}

inline bool is_integer_family(Family f) { return f == Family::S || f == Family::T || f == Family::SDelta; }
inline bool needs_delta(Family f) {
    return f == Family::DDelta || f == Family::F || f == Family::T || f == Family::SDelta;
}

struct MatrixMeta {
    std::int64_t p = 0;
    std::optional<std::int64_t> delta;
    std::optional<Family> family;
};

template <class T>
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, const T& fill = T{}) : n_(n), entries_(n * n, fill) {}

    [[nodiscard]] std::size_t size() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

    [[nodiscard]] const std::vector<T>& entries() const { return entries_; }

    MatrixMeta meta;

    friend bool operator==(const Matrix& a, const Matrix& b) { return a.n_ == b.n_ && a.entries_ == b.entries_; }

    [[nodiscard]] Matrix transpose() const {
        Matrix t(n_);
        t.meta = meta;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    std::size_t n_ = 0;
    std::vector<T> entries_;
};

using IntMatrix = Matrix<BigInt>;
using CycMatrix = Matrix<CycElt>;

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
    const auto n = a.size();
    if (b.size() != n) throw std::invalid_argument("multiply: size mismatch");
    IntMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < n; ++j) mpz_addmul(c(i, j).get_mpz_t(), a(i, k).get_mpz_t(), b(k, j).get_mpz_t());
        }
    return c;
}

/// Exact product of cyclotomic matrices. Each output entry is accumulated in
/// the raw exponent basis and canonicalized once.
inline CycMatrix multiply(const CycMatrix& a, const CycMatrix& b) {
    const auto n = a.size();
    if (b.size() != n || n == 0) throw std::invalid_argument("multiply: size mismatch");
    const auto p = a(0, 0).p();
    const auto up = static_cast<std::size_t>(p);
    CycMatrix c(n);
    std::vector<Rational> raw(up);
    Rational t;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (auto& r : raw) r = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const auto& x = a(i, k).coeffs();
                const auto& y = b(k, j).coeffs();
                for (std::size_t s = 0; s + 1 < up; ++s) {
                    if (x[s] == 0) continue;
                    for (std::size_t u = 0; u + 1 < up; ++u) {
                        if (y[u] == 0) continue;
                        auto e = s + u;
                        if (e >= up) e -= up;
                        t = x[s] * y[u];
                        raw[e] += t;
                    }
                }
            }
            c(i, j) = CycElt::make(p, raw);
        }
    }
    return c;
}

inline CycMatrix scale(const CycMatrix& a, const CycElt& s) {
    CycMatrix out(a.size());
    out.meta = a.meta;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out(i, j) = a(i, j) * s;
    return out;
}

inline CycMatrix lift(const IntMatrix& a, std::int64_t p) {
    CycMatrix out(a.size());
    out.meta = a.meta;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out(i, j) = CycElt::constant(p, Rational(a(i, j)));
    return out;
}

namespace detail {

inline std::size_t half(std::int64_t p) { return static_cast<std::size_t>((p - 1) / 2); }

inline void require_nonresidue(std::int64_t delta, std::int64_t p, const char* where) {
    if (legendre(delta, p) != -1) {
        throw std::invalid_argument(std::string(where) + ": Delta = " + std::to_string(delta) +
                                    " is not a quadratic non-residue mod " + std::to_string(p));
    }
}

inline CycMatrix monomial_square_matrix(std::int64_t p, std::int64_t mult) {
    const auto n = half(p) + 1;
    CycMatrix d(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const auto jk = static_cast<std::int64_t>((j * k) % static_cast<std::size_t>(p));
            d(j, k) = CycElt::zeta_pow(p, mod_floor(mult * jk * jk, p));
        }
    return d;
}

/// ((j^2 + mult k^2)/p) for j,k in [first, m].
inline IntMatrix legendre_matrix(std::int64_t p, std::int64_t mult, std::size_t first) {
    const auto m = half(p);
    IntMatrix s(m + 1 - first);
    for (std::size_t j = first; j <= m; ++j)
        for (std::size_t k = first; k <= m; ++k) {
            const auto jj = static_cast<std::int64_t>(j * j), kk = static_cast<std::int64_t>(k * k);
            s(j - first, k - first) = legendre(jj + mult * kk, p);
        }
    return s;
}

}  // namespace detail

inline CycMatrix build_C(std::int64_t p) {
    require_odd_prime(p, "build_C");
    const auto m = detail::half(p);
    CycMatrix c(m);
    for (std::size_t j = 1; j <= m; ++j)
        for (std::size_t k = 1; k <= m; ++k) {
            c(j - 1, k - 1) = geometric_quotient(p, static_cast<std::int64_t>(j * j), static_cast<std::int64_t>(k * k));
        }
    c.meta = {p, std::nullopt, Family::C};
    return c;
}

inline CycMatrix build_D(std::int64_t p) {
    require_odd_prime(p, "build_D");
    auto d = detail::monomial_square_matrix(p, 1);
    d.meta = {p, std::nullopt, Family::D};
    return d;
}

inline CycMatrix build_D_delta(std::int64_t p, std::int64_t delta) {
    require_odd_prime(p, "build_D_delta");
    detail::require_nonresidue(delta, p, "build_D_delta");
    auto d = detail::monomial_square_matrix(p, delta);
    d.meta = {p, delta, Family::DDelta};
    return d;
}

inline CycMatrix build_D_tilde(std::int64_t p) {
    require_odd_prime(p, "build_D_tilde");
    auto d = detail::monomial_square_matrix(p, 1);
    const auto one = CycElt::one(p);
    for (std::size_t j = 0; j < d.size(); ++j) {
        d(j, 0) = one;
        for (std::size_t k = 1; k < d.size(); ++k) d(j, k) = d(j, k) * Rational(2);
    }
    d.meta = {p, std::nullopt, Family::DTilde};
    return d;
}

inline CycMatrix build_E(std::int64_t p) {
    require_odd_prime(p, "build_E");
    if (p % 4 != 3) throw std::invalid_argument("build_E: p must be 3 mod 4");
    auto e = lift(detail::legendre_matrix(p, 1, 0), p);
    e(0, 0) = -gauss_sum(p);
    e.meta = {p, std::nullopt, Family::E};
    return e;
}

inline CycMatrix build_F(std::int64_t p, std::int64_t delta) {
    require_odd_prime(p, "build_F");
    if (p % 4 != 1) throw std::invalid_argument("build_F: p must be 1 mod 4");
    detail::require_nonresidue(delta, p, "build_F");
    auto f = lift(detail::legendre_matrix(p, delta, 0), p);
    f(0, 0) = gauss_sum(p);
    f.meta = {p, delta, Family::F};
    return f;
}

inline IntMatrix build_S(std::int64_t p) {
    require_odd_prime(p, "build_S");
    auto s = detail::legendre_matrix(p, 1, 1);
    s.meta = {p, std::nullopt, Family::S};
    return s;
}

inline IntMatrix build_T(std::int64_t p, std::int64_t delta) {
    require_odd_prime(p, "build_T");
    detail::require_nonresidue(delta, p, "build_T");
    auto t = detail::legendre_matrix(p, delta, 0);
    t.meta = {p, delta, Family::T};
    return t;
}

inline IntMatrix build_S_delta(std::int64_t p, std::int64_t delta) {
    require_odd_prime(p, "build_S_delta");
    detail::require_nonresidue(delta, p, "build_S_delta");
    auto s = detail::legendre_matrix(p, delta, 1);
    s.meta = {p, delta, Family::SDelta};
    return s;
}

}  // namespace cyclodet
