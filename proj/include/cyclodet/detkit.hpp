#pragma once

// Exact determinants, two independent backends per entry kind:
//   integers:   fraction-free Bareiss | word-prime CRT under the Hadamard bound
//   Z[zeta_p]:  fraction-free Bareiss | evaluation at all primitive p-th roots
//               in F_q (q = 1 mod p), interpolation, CRT until stable

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "cyclodet/cycring.hpp"
#include "cyclodet/matrix.hpp"
#include "cyclodet/modular.hpp"

namespace cyclodet {

enum class Backend { Bareiss, Modular };

inline std::string_view backend_name(Backend b) { return b == Backend::Bareiss ? "bareiss" : "modular"; }

struct DetStats {
    std::size_t elimination_steps = 0;
    std::size_t moduli_used = 0;
    std::size_t coefficient_bits = 0;
};

template <class T>
struct DetResult {
    T value;
    Backend backend = Backend::Bareiss;
    DetStats stats;
};

namespace detail {

inline BigInt divexact_checked(const BigInt& num, const BigInt& den) {
    if (mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()) == 0) {
        throw ArithmeticError("bareiss: inexact integer division");
    }
    BigInt q;
    mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return q;
}

inline bool is_zero(const BigInt& x) { return x == 0; }
inline bool is_zero(const CycElt& x) { return x.is_zero(); }

/// One-step Bareiss elimination. Pivot: first nonzero entry at or below the
/// diagonal in the current column; each row swap flips the sign.
template <class T, class One, class Div>
T bareiss(Matrix<T> a, One one, Div div, DetStats& stats) {
    const auto n = a.size();
    if (n == 0) return one();
    bool negate = false;
    T prev = one();
    T t;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && is_zero(a(piv, k))) ++piv;
        if (piv == n) {
            T zero = one();
            zero -= one();
            return zero;
        }
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(k, c));
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const bool lead_zero = is_zero(a(i, k));
            for (std::size_t j = k + 1; j < n; ++j) {
                t = a(k, k) * a(i, j);
                if (!lead_zero) t -= a(i, k) * a(k, j);
                a(i, j) = div(t, prev);
                ++stats.elimination_steps;
            }
        }
        prev = a(k, k);
    }
    T det = a(n - 1, n - 1);
    if (negate) det = -det;
    return det;
}

}  // namespace detail

inline DetResult<BigInt> det_int_bareiss(const IntMatrix& m) {
    DetResult<BigInt> r;
    r.backend = Backend::Bareiss;
    r.value = detail::bareiss(
        m, [] { return BigInt(1); }, detail::divexact_checked, r.stats);
    r.stats.coefficient_bits = mpz_sizeinbase(r.value.get_mpz_t(), 2);
    return r;
}

/// CRT over primes below 2^31 until the modulus exceeds twice the Hadamard
/// bound n^{n/2} max|a_ij|^n.
inline DetResult<BigInt> det_int_modular(const IntMatrix& m) {
    DetResult<BigInt> r;
    r.backend = Backend::Modular;
    const auto n = m.size();
    if (n == 0) {
        r.value = 1;
        return r;
    }
    BigInt max_abs = 0;
    for (const auto& e : m.entries()) max_abs = std::max(max_abs, BigInt(abs(e)));
    // Need M > 2B, i.e. M^2 > 4 n^n max^{2n}.
    const BigInt four_b2 = 4 * big_pow(BigInt(static_cast<unsigned long>(n)), n) * big_pow(max_abs, 2 * n);
    modular::CrtVector crt(1);
    std::vector<modular::Residue> a(n * n);
    for (std::size_t idx = 0; crt.modulus() * crt.modulus() <= four_b2; ++idx) {
        const auto q = modular::word_prime(idx);
        for (std::size_t i = 0; i < n * n; ++i) a[i] = modular::reduce(m.entries()[i], q);
        const modular::Residue d = modular::det_mod(a, n, q);
        crt.add(q, std::span<const modular::Residue>(&d, 1));
        r.stats.elimination_steps += n * n * n / 3;
    }
    r.stats.moduli_used = crt.primes_used();
    r.value = crt.symmetric()[0];
    r.stats.coefficient_bits = mpz_sizeinbase(r.value.get_mpz_t(), 2);
    return r;
}

namespace detail {

inline void require_cyclotomic(const CycMatrix& m, const char* where) {
    if (m.size() == 0) return;
    const auto p = m(0, 0).p();
    for (const auto& e : m.entries()) {
        if (e.p() != p) throw std::invalid_argument(std::string(where) + ": entries with mixed p");
        if (!e.is_integral()) throw std::invalid_argument(std::string(where) + ": entries must be integral");
    }
}

inline std::int64_t matrix_prime(const CycMatrix& m) {
    if (m.size() == 0) throw std::invalid_argument("determinant of an empty cyclotomic matrix needs p");
    return m(0, 0).p();
}

}  // namespace detail

inline DetResult<CycElt> det_cyc_bareiss(const CycMatrix& m) {
    detail::require_cyclotomic(m, "det_cyc_bareiss");
    const auto p = detail::matrix_prime(m);
    DetResult<CycElt> r;
    r.backend = Backend::Bareiss;
    r.value = detail::bareiss(
        m, [p] { return CycElt::one(p); }, [](const CycElt& a, const CycElt& b) { return exact_div(a, b); },
        r.stats);
    if (!r.value.is_integral()) throw ArithmeticError("det_cyc_bareiss: non-integral determinant");
    r.stats.coefficient_bits = r.value.max_bits();
    return r;
}

/// Evaluation-interpolation determinant. For each auxiliary prime the matrix
/// is evaluated at every primitive p-th root of unity in F_q, the p-1 scalar
/// determinants are interpolated back to power-basis coefficients mod q, and
/// the coefficient vectors are combined by CRT until one more prime leaves
/// the symmetric reconstruction unchanged.
inline DetResult<CycElt> det_cyc_evalinterp(const CycMatrix& m, std::size_t max_primes = 512) {
    detail::require_cyclotomic(m, "det_cyc_evalinterp");
    const auto p = detail::matrix_prime(m);
    const auto n = m.size();
    const auto len = static_cast<std::size_t>(p - 1);
    DetResult<CycElt> r;
    r.backend = Backend::Modular;
    modular::CrtVector crt(len);
    std::vector<modular::Residue> coeffs(len);
    // values[k][i] = entry i evaluated at root^{k+1}
    std::vector<std::vector<modular::Residue>> values(len, std::vector<modular::Residue>(n * n));
    std::vector<modular::Residue> dets(len);
    for (std::size_t idx = 0; idx < max_primes; ++idx) {
        const auto& aux = modular::aux_prime(p, idx);
        for (std::size_t e = 0; e < n * n; ++e) {
            const auto& c = m.entries()[e].coeffs();
            for (std::size_t i = 0; i < len; ++i) coeffs[i] = modular::reduce(c[i].get_num(), aux.q);
            const auto v = modular::eval_at_roots(coeffs, aux);
            for (std::size_t k = 0; k < len; ++k) values[k][e] = v[k];
        }
        for (std::size_t k = 0; k < len; ++k) {
            dets[k] = modular::det_mod(values[k], n, aux.q);
            r.stats.elimination_steps += n * n * n / 3;
        }
        if (crt.add(aux.q, modular::interpolate(dets, aux))) {
            r.value = CycElt::from_integers(p, crt.symmetric());
            r.stats.moduli_used = crt.primes_used();
            r.stats.coefficient_bits = r.value.max_bits();
            return r;
        }
    }
    throw ArithmeticError("det_cyc_evalinterp: CRT reconstruction did not stabilize");
}

inline DetResult<BigInt> det_int(const IntMatrix& m, Backend b) {
    return b == Backend::Bareiss ? det_int_bareiss(m) : det_int_modular(m);
}

inline DetResult<CycElt> det_cyc(const CycMatrix& m, Backend b) {
    return b == Backend::Bareiss ? det_cyc_bareiss(m) : det_cyc_evalinterp(m);
}

}  // namespace cyclodet
