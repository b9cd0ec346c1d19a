#pragma once

// Class numbers and fundamental units of Q(sqrt(+-p)) by elementary means, and
// the product formulas relating them to prod_{k=1}^{m} (1 - zeta^{k^2}).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "cyclodet/cycring.hpp"
#include "cyclodet/numtheory.hpp"
#include "cyclodet/subfield.hpp"

namespace cyclodet {

/// h(-p) for p = 3 (mod 4), p > 3: the number of reduced forms
/// a x^2 + b x y + c y^2 of discriminant -p (-a < b <= a <= c, b >= 0 if a = c).
inline std::int64_t h_neg(std::int64_t p) {
    require_odd_prime(p, "h_neg");
    if (p % 4 != 3 || p <= 3) throw std::invalid_argument("h_neg: need p = 3 mod 4, p > 3");
    std::int64_t count = 0;
    for (std::int64_t a = 1; 3 * a * a <= p; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            const std::int64_t num = b * b + p;
            if (num % (4 * a) != 0) continue;
            const std::int64_t c = num / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            if (gcd64(gcd64(a, b), c) != 1) continue;
            ++count;
        }
    }
    return count;
}

/// epsilon_p = (t + u sqrt p) / 2 with t^2 - p u^2 = +-4.
struct FundamentalUnit {
    BigInt t;
    BigInt u;
    int norm = 0;  // -1 or +1

    [[nodiscard]] QuadElt as_quad(std::int64_t p) const {
        return {p, Rational(t, 2), Rational(u, 2)};
    }

    friend bool operator==(const FundamentalUnit&, const FundamentalUnit&) = default;
};

/// Smallest u >= 1 for which t^2 = p u^2 -+ 4 is a perfect square (norm -1 first).
inline FundamentalUnit fundamental_unit(std::int64_t p, std::int64_t max_u = 10'000'000) {
    require_odd_prime(p, "fundamental_unit");
    if (p % 4 != 1) throw std::invalid_argument("fundamental_unit: need p = 1 mod 4");
    BigInt t2, root;
    for (std::int64_t u = 1; u <= max_u; ++u) {
        const BigInt pu2 = BigInt(static_cast<long>(p)) * u * u;
        for (int sign : {-1, 1}) {
            t2 = pu2 + 4 * sign;
            if (t2 > 0 && mpz_perfect_square_p(t2.get_mpz_t()) != 0) {
                mpz_sqrt(root.get_mpz_t(), t2.get_mpz_t());
                return {root, BigInt(static_cast<long>(u)), sign};
            }
        }
    }
    throw ArithmeticError("fundamental_unit: search cap exceeded for p = " + std::to_string(p));
}

struct ClassData {
    std::int64_t p = 0;
    std::optional<std::int64_t> h_neg;
    std::optional<std::int64_t> h_pos;
    std::optional<FundamentalUnit> eps;

    friend bool operator==(const ClassData&, const ClassData&) = default;
};

/// prod_{k=1}^{m} (1 - zeta^{k^2}), one factor per nonzero square class.
inline CycElt residue_product(std::int64_t p) {
    require_odd_prime(p, "residue_product");
    const auto one = CycElt::one(p);
    CycElt prod = one;
    for (std::int64_t k = 1; k <= (p - 1) / 2; ++k) prod *= one - CycElt::zeta_pow(p, (k * k) % p);
    return prod;
}

struct ProductFormulaReport {
    std::int64_t p = 0;
    bool ok = false;
    CycElt product;
    QuadElt coords;
    /// p = 3 mod 4: product / g, and the expected (-1)^{(h(-p)+1)/2}.
    std::optional<Rational> ratio;
    std::optional<int> expected_sign;
    /// p = 1 mod 4: least h with product * eps^h = g.
    std::optional<std::int64_t> h;
    std::string detail;
};

/// Checks prod (1 - zeta^{k^2}) against (-1)^{(h(-p)+1)/2} g (p = 3 mod 4) or
/// eps_p^{-h(p)} g (p = 1 mod 4), where g is the Gauss sum.
inline ProductFormulaReport verify_product_formula(std::int64_t p, std::int64_t max_h = 1000) {
    require_odd_prime(p, "verify_product_formula");
    if (p <= 3) throw std::invalid_argument("verify_product_formula: need p > 3");
    ProductFormulaReport r;
    r.p = p;
    r.product = residue_product(p);
    r.coords = quad_decompose(r.product);
    if (p % 4 == 3) {
        const auto h = h_neg(p);
        const bool square_ok = r.product * r.product == CycElt::constant(p, -p);
        r.ratio = r.coords.y();
        r.expected_sign = ((h + 1) / 2) % 2 == 0 ? 1 : -1;
        r.ok = square_ok && r.coords.x() == 0 && *r.ratio == *r.expected_sign;
        r.detail = "P = " + r.coords.to_string() + ", h(-p) = " + std::to_string(h) +
                   (square_ok ? ", P^2 = -p" : ", P^2 != -p");
        return r;
    }
    const auto eps = fundamental_unit(p).as_quad(p);
    const QuadElt g = QuadElt::gen(p);
    QuadElt cur = r.coords;
    for (std::int64_t h = 1; h <= max_h; ++h) {
        cur = cur * eps;
        if (cur == g) {
            r.h = h;
            r.ok = true;
            r.detail = "P * eps^" + std::to_string(h) + " = g";
            return r;
        }
    }
    r.detail = "no h <= " + std::to_string(max_h) + " with P * eps^h = g";
    return r;
}

inline ClassData class_data(std::int64_t p) {
    ClassData c;
    c.p = p;
    if (p % 4 == 3) {
        c.h_neg = h_neg(p);
    } else {
        c.eps = fundamental_unit(p);
        const auto pf = verify_product_formula(p);
        if (!pf.ok) throw ArithmeticError("class_data: " + pf.detail);
        c.h_pos = pf.h;
    }
    return c;
}

}  // namespace cyclodet
