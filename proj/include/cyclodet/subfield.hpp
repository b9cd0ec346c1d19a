#pragma once

// Quadratic and quartic subfields of Q(zeta_p).
//
// The quadratic subfield is generated by the Gauss sum g, with
// g^2 = (-1)^{(p-1)/2} p. For p = 1 (mod 4) the quartic subfield is generated
// by delta with delta^2 = (2/p) 2p + 2 a sqrt(p), where p = a^2 + b^2.
//
// No sign convention for g is assumed anywhere: identities are stated through
// g itself, and the embedding zeta -> exp(2 pi i / p) is only used to report
// observed signs.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "cyclodet/cycring.hpp"
#include "cyclodet/numtheory.hpp"

namespace cyclodet {

/// g^2 = (-1)^{(p-1)/2} p.
inline std::int64_t gauss_square(std::int64_t p) { return (p % 4 == 1) ? p : -p; }

/// g = sum_{t=1}^{p-1} (t/p) zeta^t.
inline CycElt gauss_sum(std::int64_t p) {
    require_odd_prime(p, "gauss_sum");
    std::vector<Rational> raw(static_cast<std::size_t>(p));
    for (std::int64_t t = 1; t < p; ++t) raw[static_cast<std::size_t>(t)] = legendre(t, p);
    return CycElt::make(p, raw);
}

/// x + y*g in the quadratic subfield Q(g).
class QuadElt {
public:
    QuadElt() = default;
    QuadElt(std::int64_t p, Rational x, Rational y) : p_(p), x_(std::move(x)), y_(std::move(y)) {
        x_.canonicalize();
        y_.canonicalize();
    }

    static QuadElt gen(std::int64_t p) { return {p, 0, 1}; }

    [[nodiscard]] std::int64_t p() const { return p_; }
    [[nodiscard]] const Rational& x() const { return x_; }
    [[nodiscard]] const Rational& y() const { return y_; }
    [[nodiscard]] bool is_zero() const { return x_ == 0 && y_ == 0; }

    [[nodiscard]] QuadElt conj() const { return {p_, x_, -y_}; }

    /// x^2 - g^2 y^2.
    [[nodiscard]] Rational norm() const { return x_ * x_ - Rational(gauss_square(p_)) * y_ * y_; }

    friend bool operator==(const QuadElt& a, const QuadElt& b) {
        return a.p_ == b.p_ && a.x_ == b.x_ && a.y_ == b.y_;
    }

    friend QuadElt operator+(const QuadElt& a, const QuadElt& b) { return {a.p_, a.x_ + b.x_, a.y_ + b.y_}; }
    friend QuadElt operator-(const QuadElt& a, const QuadElt& b) { return {a.p_, a.x_ - b.x_, a.y_ - b.y_}; }
    friend QuadElt operator-(const QuadElt& a) { return {a.p_, -a.x_, -a.y_}; }

    friend QuadElt operator*(const QuadElt& a, const QuadElt& b) {
        const Rational d = gauss_square(a.p_);
        return {a.p_, a.x_ * b.x_ + d * a.y_ * b.y_, a.x_ * b.y_ + a.y_ * b.x_};
    }

    friend QuadElt operator*(const QuadElt& a, const Rational& s) { return {a.p_, a.x_ * s, a.y_ * s}; }

    friend QuadElt operator/(const QuadElt& a, const QuadElt& b) {
        const Rational n = b.norm();
        if (n == 0) throw std::domain_error("QuadElt: division by zero");
        const QuadElt t = a * b.conj();
        return {a.p_, t.x_ / n, t.y_ / n};
    }

    [[nodiscard]] QuadElt pow(unsigned long e) const {
        QuadElt r(p_, 1, 0);
        QuadElt b = *this;
        while (e > 0) {
            if (e & 1UL) r = r * b;
            b = b * b;
            e >>= 1U;
        }
        return r;
    }

    [[nodiscard]] CycElt to_cyc() const { return CycElt::constant(p_, x_) + gauss_sum(p_) * y_; }

    [[nodiscard]] std::string to_string() const { return x_.get_str() + " + (" + y_.get_str() + ")*g"; }

private:
    std::int64_t p_ = 0;
    Rational x_;
    Rational y_;
};

/// x = u + v*g for x fixed by the index-2 subgroup of squares. `n` selects the
/// non-residue used for the conjugate; the result does not depend on it.
inline QuadElt quad_decompose(const CycElt& x, std::optional<std::int64_t> n = std::nullopt) {
    const auto p = x.p();
    const auto r = least_primitive_root(p);
    if (!(galois(r * r, x) == x)) {
        throw std::invalid_argument("quad_decompose: element is not in the quadratic subfield");
    }
    const auto nr = n.value_or(least_nonresidue(p));
    if (legendre(nr, p) != -1) throw std::invalid_argument("quad_decompose: n must be a non-residue");
    const CycElt conj = galois(nr, x);
    const CycElt g = gauss_sum(p);
    const CycElt twice_u = x + conj;
    const CycElt twice_v = exact_div((x - conj) * g, CycElt::constant(p, gauss_square(p)));
    if (!twice_u.is_constant() || !twice_v.is_constant()) {
        throw ArithmeticError("quad_decompose: coordinates are not rational");
    }
    QuadElt out(p, twice_u.coeff(0) / 2, twice_v.coeff(0) / 2);
    if (!(out.to_cyc() == x)) throw ArithmeticError("quad_decompose: reconstruction failed");
    return out;
}

struct TwoSquares {
    std::int64_t p = 0;
    std::int64_t a = 0;  // odd, positive
    std::int64_t b = 0;  // even, positive
};

inline TwoSquares two_squares(std::int64_t p) {
    require_odd_prime(p, "two_squares");
    if (p % 4 != 1) throw std::invalid_argument("two_squares: p must be 1 mod 4");
    for (std::int64_t a = 1; a * a < p; a += 2) {
        const std::int64_t rest = p - a * a;
        auto b = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rest))));
        while (b * b > rest) --b;
        while ((b + 1) * (b + 1) <= rest) ++b;
        if (b * b == rest) return {p, a, b};
    }
    throw ArithmeticError("two_squares: no representation found");
}

namespace detail {

inline std::optional<Rational> rational_sqrt(const Rational& x) {
    if (x < 0) return std::nullopt;
    if (x == 0) return Rational(0);
    if (mpz_perfect_square_p(x.get_num_mpz_t()) == 0 || mpz_perfect_square_p(x.get_den_mpz_t()) == 0) {
        return std::nullopt;
    }
    BigInt n, d;
    mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
    Rational r(n, d);
    r.canonicalize();
    return r;
}

}  // namespace detail

/// Rational (alpha, beta) with (alpha + beta sqrt(p))^2 = C + D sqrt(p), if any.
/// Normalized to alpha > 0, or beta > 0 when alpha = 0.
inline std::optional<std::pair<Rational, Rational>> sqrt_in_quad(const Rational& c, const Rational& d,
                                                                 std::int64_t p) {
    const Rational pp(p);
    if (d == 0) {
        if (auto a = detail::rational_sqrt(c)) return std::pair{*a, Rational(0)};
        if (auto b = detail::rational_sqrt(c / pp)) return std::pair{Rational(0), *b};
        return std::nullopt;
    }
    // alpha^2 =: t solves t^2 - C t + p D^2 / 4 = 0.
    const auto disc = detail::rational_sqrt(c * c - pp * d * d);
    if (!disc) return std::nullopt;
    for (const Rational& t : {Rational((c + *disc) / 2), Rational((c - *disc) / 2)}) {
        if (t <= 0) continue;
        if (auto a = detail::rational_sqrt(t)) {
            Rational beta = d / (2 * *a);
            return std::pair{*a, beta};
        }
    }
    return std::nullopt;
}

/// (alpha + beta sqrt(p)) * delta with delta^2 = (2/p) 2p + 2 s a sqrt(p).
struct QuarticDecomp {
    std::int64_t p = 0;
    Rational alpha;
    Rational beta;
    std::int64_t a = 0;
    std::int64_t b = 0;
    int delta_sign = 1;
    /// True once d ~ (alpha + beta sqrt(p)) * delta was confirmed numerically
    /// with delta the principal complex square root.
    bool resolved_numerically = false;

    /// delta^2 as an element of Q(sqrt p), sqrt p = g.
    [[nodiscard]] QuadElt delta_square() const {
        return {p, Rational(legendre(2, p) * 2 * p), Rational(2 * delta_sign * a)};
    }
    [[nodiscard]] QuadElt factor() const { return {p, alpha, beta}; }
};

namespace detail {

inline std::complex<long double> to_complex(const ComplexApprox& z) { return {z.re, z.im}; }

}  // namespace detail

/// Writes d = det D_p (p = 1 mod 4) as (alpha + beta sqrt p) * delta. Branches
/// s = +1 then s = -1 are tried; the first admitting a rational square root
/// wins. The overall sign of (alpha, beta) is pinned numerically.
inline QuarticDecomp quartic_decompose(const CycElt& d, std::int64_t p) {
    if (p % 4 != 1) throw std::invalid_argument("quartic_decompose: p must be 1 mod 4");
    if (d.p() != p) throw std::invalid_argument("quartic_decompose: mismatched p");
    const auto ts = two_squares(p);
    const QuadElt sq = quad_decompose(d * d);
    const auto d_num = detail::to_complex(eval_complex(d));
    for (int s : {1, -1}) {
        QuarticDecomp out;
        out.p = p;
        out.a = ts.a;
        out.b = ts.b;
        out.delta_sign = s;
        const QuadElt y2 = sq / out.delta_square();
        auto root = sqrt_in_quad(y2.x(), y2.y(), p);
        if (!root) continue;
        out.alpha = root->first;
        out.beta = root->second;
        if (!(out.factor() * out.factor() * out.delta_square() == sq)) {
            throw ArithmeticError("quartic_decompose: squared identity failed");
        }
        const auto delta = std::sqrt(detail::to_complex(eval_complex(out.delta_square().to_cyc())));
        const auto y = detail::to_complex(eval_complex(out.factor().to_cyc()));
        const auto plus = std::abs(d_num - y * delta);
        const auto minus = std::abs(d_num + y * delta);
        if (minus < plus) {
            out.alpha = -out.alpha;
            out.beta = -out.beta;
        }
        out.resolved_numerically = std::min(plus, minus) <= 1e-9L * std::abs(d_num);
        return out;
    }
    throw ArithmeticError("quartic_decompose: no branch yields a rational factor");
}

/// g(4) = sum_{t=0}^{p-1} zeta^{t^4}.
inline CycElt quartic_period(std::int64_t p) {
    std::vector<Rational> raw(static_cast<std::size_t>(p));
    for (std::int64_t t = 0; t < p; ++t) {
        const auto t2 = (t * t) % p;
        raw[static_cast<std::size_t>((t2 * t2) % p)] += 1;
    }
    return CycElt::make(p, raw);
}

/// Verifies (g(4) - g)^2 = (2/p) 2p + 2 a' g exactly and returns the sign of a'
/// relative to the positive a of two_squares.
inline int quartic_gauss_check(std::int64_t p) {
    const auto ts = two_squares(p);
    const CycElt w = quartic_period(p) - gauss_sum(p);
    const QuadElt sq = quad_decompose(w * w);
    if (sq.x() != Rational(legendre(2, p) * 2 * p)) {
        throw ArithmeticError("quartic_gauss_check: rational part mismatch for p = " + std::to_string(p));
    }
    if (sq.y() == Rational(2 * ts.a)) return 1;
    if (sq.y() == Rational(-2 * ts.a)) return -1;
    throw ArithmeticError("quartic_gauss_check: neither sign verifies for p = " + std::to_string(p));
}

}  // namespace cyclodet
