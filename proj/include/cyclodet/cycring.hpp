#pragma once

// Exact arithmetic in the cyclotomic field Q(zeta_p), p an odd prime.
//
// Elements live in the power basis 1, zeta, ..., zeta^{p-2}; zeta^{p-1} is
// always rewritten as -(1 + zeta + ... + zeta^{p-2}). Because Phi_p is
// irreducible this basis is a Q-basis, so equality is coefficient equality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <mpfr.h>

#include "cyclodet/modular.hpp"
#include "cyclodet/numtheory.hpp"

namespace cyclodet {

class CycElt {
public:
    CycElt() = default;

    static CycElt zero(std::int64_t p) {
        require_odd_prime(p, "CycElt::zero");
        return CycElt(p, std::vector<Rational>(static_cast<std::size_t>(p - 1)));
    }

    static CycElt constant(std::int64_t p, const Rational& c) {
        auto e = zero(p);
        e.coeffs_[0] = c;
        return e;
    }

    static CycElt one(std::int64_t p) { return constant(p, 1); }

    /// zeta^e for any integer e.
    static CycElt zeta_pow(std::int64_t p, std::int64_t e) {
        require_odd_prime(p, "CycElt::zeta_pow");
        std::vector<Rational> raw(static_cast<std::size_t>(p));
        raw[static_cast<std::size_t>(mod_floor(e, p))] = 1;
        return canonical(p, std::move(raw));
    }

    /// Canonical representative of sum_{i=0}^{p-1} raw_i zeta^i.
    static CycElt make(std::int64_t p, std::span<const Rational> raw) {
        require_odd_prime(p, "CycElt::make");
        if (raw.size() != static_cast<std::size_t>(p)) {
            throw std::invalid_argument("CycElt::make: expected p raw coefficients");
        }
        return canonical(p, std::vector<Rational>(raw.begin(), raw.end()));
    }

    /// Wraps p-1 power-basis coefficients directly.
    static CycElt from_coeffs(std::int64_t p, std::vector<Rational> coeffs) {
        require_odd_prime(p, "CycElt::from_coeffs");
        if (coeffs.size() != static_cast<std::size_t>(p - 1)) {
            throw std::invalid_argument("CycElt::from_coeffs: expected p-1 coefficients");
        }
        return CycElt(p, std::move(coeffs));
    }

    static CycElt from_integers(std::int64_t p, std::span<const BigInt> coeffs) {
        std::vector<Rational> c;
        c.reserve(coeffs.size());
        for (const auto& x : coeffs) c.emplace_back(x);
        return from_coeffs(p, std::move(c));
    }

    [[nodiscard]] std::int64_t p() const { return p_; }
    [[nodiscard]] const std::vector<Rational>& coeffs() const { return coeffs_; }
    [[nodiscard]] const Rational& coeff(std::size_t i) const { return coeffs_[i]; }

    [[nodiscard]] bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
    }

    [[nodiscard]] bool is_integral() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [](const Rational& c) { return c.get_den() == 1; });
    }

    [[nodiscard]] bool is_constant() const {
        return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Rational& c) { return c == 0; });
    }

    /// Largest coefficient bit length (numerator or denominator).
    [[nodiscard]] std::size_t max_bits() const {
        std::size_t b = 0;
        for (const auto& c : coeffs_) {
            b = std::max({b, mpz_sizeinbase(c.get_num_mpz_t(), 2), mpz_sizeinbase(c.get_den_mpz_t(), 2)});
        }
        return b;
    }

    friend bool operator==(const CycElt& a, const CycElt& b) { return a.p_ == b.p_ && a.coeffs_ == b.coeffs_; }

    CycElt& operator+=(const CycElt& o) {
        check_same(o, "+");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }

    CycElt& operator-=(const CycElt& o) {
        check_same(o, "-");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }

    CycElt& operator*=(const Rational& s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    friend CycElt operator+(CycElt a, const CycElt& b) { return a += b; }
    friend CycElt operator-(CycElt a, const CycElt& b) { return a -= b; }
    friend CycElt operator*(CycElt a, const Rational& s) { return a *= s; }
    friend CycElt operator*(const Rational& s, CycElt a) { return a *= s; }

    friend CycElt operator-(CycElt a) {
        for (auto& c : a.coeffs_) c = -c;
        return a;
    }

    friend CycElt operator*(const CycElt& x, const CycElt& y) { return mul(x, y); }

    CycElt& operator*=(const CycElt& o) { return *this = mul(*this, o); }

    /// Exact product, by convolution of exponents mod p.
    static CycElt mul(const CycElt& x, const CycElt& y) {
        x.check_same(y, "*");
        const auto p = static_cast<std::size_t>(x.p_);
        const auto xs = x.support();
        const auto ys = y.support();
        if (x.is_integral() && y.is_integral()) {
            std::vector<BigInt> raw(p);
            for (auto i : xs) {
                const mpz_srcptr xi = x.coeffs_[i].get_num_mpz_t();
                for (auto j : ys) {
                    auto k = i + j;
                    if (k >= p) k -= p;
                    mpz_addmul(raw[k].get_mpz_t(), xi, y.coeffs_[j].get_num_mpz_t());
                }
            }
            std::vector<Rational> c(p - 1);
            for (std::size_t i = 0; i + 1 < p; ++i) {
                raw[i] -= raw[p - 1];
                mpq_set_z(c[i].get_mpq_t(), raw[i].get_mpz_t());
            }
            return CycElt(x.p_, std::move(c));
        }
        std::vector<Rational> raw(p);
        Rational t;
        for (auto i : xs) {
            for (auto j : ys) {
                auto k = i + j;
                if (k >= p) k -= p;
                t = x.coeffs_[i] * y.coeffs_[j];
                raw[k] += t;
            }
        }
        return canonical(x.p_, std::move(raw));
    }

    [[nodiscard]] std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            const auto& c = coeffs_[i];
            if (c == 0) continue;
            const bool neg = c < 0;
            const Rational mag = neg ? Rational(-c) : c;
            if (first) {
                if (neg) os << "-";
            } else {
                os << (neg ? " - " : " + ");
            }
            first = false;
            if (i == 0) {
                os << mag.get_str();
                continue;
            }
            if (mag != 1) os << mag.get_str() << "*";
            os << "z";
            if (i > 1) os << "^" << i;
        }
        if (first) os << "0";
        return os.str();
    }

    /// Coefficients c_0..c_{p-2} as decimal strings.
    [[nodiscard]] std::vector<std::string> coeff_strings() const {
        std::vector<std::string> out;
        out.reserve(coeffs_.size());
        for (const auto& c : coeffs_) out.push_back(c.get_str());
        return out;
    }

private:
    CycElt(std::int64_t p, std::vector<Rational> coeffs) : p_(p), coeffs_(std::move(coeffs)) {}

    static CycElt canonical(std::int64_t p, std::vector<Rational> raw) {
        const auto top = raw.back();
        raw.pop_back();
        if (top != 0) {
            for (auto& c : raw) c -= top;
        }
        return CycElt(p, std::move(raw));
    }

    [[nodiscard]] std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] != 0) s.push_back(i);
        }
        return s;
    }

    void check_same(const CycElt& o, const char* op) const {
        if (p_ != o.p_ || p_ == 0) {
            throw std::invalid_argument(std::string("CycElt ") + op + ": mismatched or unset p");
        }
    }

    std::int64_t p_ = 0;
    std::vector<Rational> coeffs_;

    friend CycElt galois(std::int64_t a, const CycElt& x);
    friend CycElt geometric_quotient(std::int64_t p, std::int64_t e, std::int64_t n);
};

/// sigma_a : zeta -> zeta^a.
inline CycElt galois(std::int64_t a, const CycElt& x) {
    const auto p = x.p();
    if (mod_floor(a, p) == 0) {
        throw std::invalid_argument("galois: a must be coprime to p");
    }
    std::vector<Rational> raw(static_cast<std::size_t>(p));
    const auto am = mod_floor(a, p);
    for (std::int64_t i = 0; i + 1 < p; ++i) {
        raw[static_cast<std::size_t>((am * i) % p)] = x.coeffs_[static_cast<std::size_t>(i)];
    }
    return CycElt::canonical(p, std::move(raw));
}

/// sum_{t=0}^{n-1} zeta^{e t} = (1 - zeta^{e n}) / (1 - zeta^e).
inline CycElt geometric_quotient(std::int64_t p, std::int64_t e, std::int64_t n) {
    require_odd_prime(p, "geometric_quotient");
    if (mod_floor(e, p) == 0) throw std::invalid_argument("geometric_quotient: e = 0 mod p");
    if (n < 1) throw std::invalid_argument("geometric_quotient: n < 1");
    std::vector<Rational> raw(static_cast<std::size_t>(p));
    const auto em = mod_floor(e, p);
    // A full orbit sums to zero, so only n mod p terms matter.
    std::int64_t k = 0;
    for (std::int64_t t = 0; t < n % p; ++t) {
        raw[static_cast<std::size_t>(k)] += 1;
        k = (k + em) % p;
    }
    return CycElt::canonical(p, std::move(raw));
}

namespace detail {

using Poly = std::vector<Rational>;

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_sub(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

/// (quotient, remainder) of a / b, b nonzero and trimmed.
inline std::pair<Poly, Poly> poly_divmod(Poly a, const Poly& b) {
    trim(a);
    if (a.size() < b.size()) return {{}, a};
    Poly q(a.size() - b.size() + 1);
    const Rational lead_inv = 1 / b.back();
    while (!a.empty() && a.size() >= b.size()) {
        const std::size_t shift = a.size() - b.size();
        const Rational f = a.back() * lead_inv;
        q[shift] = f;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    trim(q);
    return {q, a};
}

/// Quotient num/den in Z[zeta] by evaluation at all primitive p-th roots
/// modulo auxiliary primes, CRT, and exact re-multiplication. Returns nullopt
/// when the quotient is not integral (detected by exceeding a rigorous
/// coefficient bound without a verified candidate).
inline std::optional<CycElt> modular_quotient(const CycElt& num, const CycElt& den) {
    const auto p = num.p();
    const auto len = static_cast<std::size_t>(p - 1);
    // |sigma(q)| <= L1(num) * L1(den)^{p-2}; coefficients are at most 2 max|sigma(q)|.
    auto log2_l1 = [](const CycElt& x) {
        double bits = 0;
        for (const auto& c : x.coeffs()) bits = std::max(bits, double(mpz_sizeinbase(c.get_num_mpz_t(), 2)));
        return bits + std::log2(double(x.coeffs().size()));
    };
    const double bound_bits = log2_l1(num) + double(p - 2) * log2_l1(den) + 3;
    modular::CrtVector crt(len);
    std::vector<modular::Residue> nc(len), dc(len), vals(len);
    for (std::size_t idx = 0;; ++idx) {
        const auto& aux = modular::aux_prime(p, idx);
        for (std::size_t i = 0; i < len; ++i) {
            dc[i] = modular::reduce(den.coeff(i).get_num(), aux.q);
            nc[i] = modular::reduce(num.coeff(i).get_num(), aux.q);
        }
        const auto dv = modular::eval_at_roots(dc, aux);
        if (std::any_of(dv.begin(), dv.end(), [](auto v) { return v == 0; })) continue;
        const auto nv = modular::eval_at_roots(nc, aux);
        for (std::size_t k = 0; k < len; ++k) vals[k] = mul_mod(nv[k], inv_mod(dv[k], aux.q), aux.q);
        const bool stable = crt.add(aux.q, modular::interpolate(vals, aux));
        if (stable) {
            auto cand = CycElt::from_integers(p, crt.symmetric());
            if (cand * den == num) return cand;
        }
        if (double(mpz_sizeinbase(crt.modulus().get_mpz_t(), 2)) > bound_bits + 2 * 21) return std::nullopt;
    }
}

}  // namespace detail

/// Multiplicative inverse in Q[x]/Phi_p(x) by the extended Euclidean algorithm.
inline CycElt inverse(const CycElt& x) {
    if (x.is_zero()) throw std::domain_error("inverse: zero element");
    const auto p = x.p();
    detail::Poly phi(static_cast<std::size_t>(p), Rational(1));
    detail::Poly r0 = phi;
    detail::Poly r1(x.coeffs().begin(), x.coeffs().end());
    detail::trim(r1);
    detail::Poly t0;
    detail::Poly t1{Rational(1)};
    while (!r1.empty()) {
        auto [q, r] = detail::poly_divmod(r0, r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        auto t2 = detail::poly_sub(t0, detail::poly_mul(q, t1));
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.size() != 1) throw ArithmeticError("inverse: gcd with Phi_p is not constant");
    const Rational c_inv = 1 / r0[0];
    std::vector<Rational> raw(static_cast<std::size_t>(p));
    if (t0.size() > raw.size()) throw ArithmeticError("inverse: Bezout coefficient too long");
    for (std::size_t i = 0; i < t0.size(); ++i) raw[i] = t0[i] * c_inv;
    return CycElt::make(p, raw);
}

/// num / den through the Euclidean inverse; result verified by re-multiplication.
inline CycElt exact_div_euclid(const CycElt& num, const CycElt& den) {
    auto q = num * inverse(den);
    if (!(q * den == num)) throw ArithmeticError("exact_div: re-multiplication check failed");
    return q;
}

/// Exact quotient in Q(zeta_p). Constant divisors are scaled directly;
/// integral operands first try the modular quotient (itself verified by
/// re-multiplication) and fall back to the Euclidean inverse.
inline CycElt exact_div(const CycElt& num, const CycElt& den) {
    if (num.p() != den.p()) throw std::invalid_argument("exact_div: mismatched p");
    if (den.is_zero()) throw std::domain_error("exact_div: division by zero");
    if (den.is_constant()) return num * (1 / den.coeff(0));
    if (num.is_integral() && den.is_integral()) {
        if (auto q = detail::modular_quotient(num, den)) return *q;
    }
    return exact_div_euclid(num, den);
}

struct ComplexApprox {
    long double re = 0;
    long double im = 0;
    /// Bound on |computed - exact| for the value under zeta = exp(2 pi i / p).
    long double error_bound = 0;
};

/// Numeric value under the embedding zeta -> exp(2 pi i / p), evaluated with
/// `digits` significant decimal digits of working precision.
inline ComplexApprox eval_complex(const CycElt& x, int digits = 30) {
    if (digits < 15) throw std::invalid_argument("eval_complex: need at least 15 digits");
    const auto bits = static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623) + 32);
    mpfr_t re, im, angle, s, c, term, coeff, l1;
    for (auto* v : {&re, &im, &angle, &s, &c, &term, &coeff, &l1}) {
        mpfr_init2(*v, bits);
        mpfr_set_zero(*v, 1);
    }
    const auto p = x.p();
    for (std::int64_t i = 0; i + 1 < p; ++i) {
        const auto& ci = x.coeff(static_cast<std::size_t>(i));
        if (ci == 0) continue;
        mpfr_const_pi(angle, MPFR_RNDN);
        mpfr_mul_si(angle, angle, 2 * i, MPFR_RNDN);
        mpfr_div_si(angle, angle, static_cast<long>(p), MPFR_RNDN);
        mpfr_sin_cos(s, c, angle, MPFR_RNDN);
        mpfr_set_q(coeff, ci.get_mpq_t(), MPFR_RNDN);
        mpfr_mul(term, coeff, c, MPFR_RNDN);
        mpfr_add(re, re, term, MPFR_RNDN);
        mpfr_mul(term, coeff, s, MPFR_RNDN);
        mpfr_add(im, im, term, MPFR_RNDN);
        mpfr_abs(coeff, coeff, MPFR_RNDN);
        mpfr_add(l1, l1, coeff, MPFR_RNDN);
    }
    ComplexApprox out;
    out.re = mpfr_get_ld(re, MPFR_RNDN);
    out.im = mpfr_get_ld(im, MPFR_RNDN);
    const long double work_eps = std::ldexp(1.0L, static_cast<int>(-bits + 3));
    const long double out_eps = std::ldexp(1.0L, -62);
    out.error_bound = static_cast<long double>(2 * p + 8) * work_eps * mpfr_get_ld(l1, MPFR_RNDU) +
                      out_eps * (std::fabs(out.re) + std::fabs(out.im));
    for (auto* v : {&re, &im, &angle, &s, &c, &term, &coeff, &l1}) mpfr_clear(*v);
    return out;
}

/// Image of an integral element under zeta -> r in F_q, r of order p.
inline modular::Residue eval_mod(const CycElt& x, modular::Residue q, modular::Residue r) {
    const auto p = static_cast<modular::Residue>(x.p());
    if (q % p != 1) throw std::invalid_argument("eval_mod: q must be 1 mod p");
    r %= q;
    if (r == 1 || pow_mod(r, p, q) != 1) throw std::invalid_argument("eval_mod: r must have order p");
    if (!x.is_integral()) throw std::invalid_argument("eval_mod: element is not integral");
    modular::Residue acc = 0;
    modular::Residue pw = 1;
    for (const auto& c : x.coeffs()) {
        acc = (acc + mul_mod(modular::reduce(c.get_num(), q), pw, q)) % q;
        pw = mul_mod(pw, r, q);
    }
    return acc;
}

}  // namespace cyclodet
