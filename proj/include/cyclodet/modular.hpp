#pragma once

// Word-sized prime field machinery shared by the multi-modular backends:
// auxiliary primes q = 1 (mod p) with a fixed element of order p, evaluation of
// power-basis vectors at all primitive p-th roots in F_q and the inverse
// (interpolation) map, CRT accumulation in the symmetric range, and dense
// determinants over F_q.

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "cyclodet/numtheory.hpp"

namespace cyclodet::modular {

using Residue = std::uint64_t;

/// A prime q = 1 (mod p) together with an element of multiplicative order p.
/// `powers[e]` holds root^e for 0 <= e < p.
struct AuxPrime {
    Residue q = 0;
    Residue root = 0;
    std::vector<Residue> powers;
};

inline constexpr Residue kAuxPrimeFloor = Residue{1} << 20;

namespace detail {

inline AuxPrime make_aux_prime(std::int64_t p, Residue q) {
    AuxPrime a;
    a.q = q;
    const auto up = static_cast<Residue>(p);
    for (Residue x = 2; x < q; ++x) {
        Residue r = pow_mod(x, (q - 1) / up, q);
        if (r != 1) {
            a.root = r;
            break;
        }
    }
    a.powers.resize(up);
    a.powers[0] = 1;
    for (Residue e = 1; e < up; ++e) a.powers[e] = mul_mod(a.powers[e - 1], a.root, q);
    if (mul_mod(a.powers[up - 1], a.root, q) != 1) throw ArithmeticError("aux prime: root order is not p");
    return a;
}

}  // namespace detail

/// The `index`-th smallest prime q = 1 (mod p) above 2^20 (cached, thread-safe).
inline const AuxPrime& aux_prime(std::int64_t p, std::size_t index) {
    static std::mutex mu;
    static std::map<std::int64_t, std::deque<AuxPrime>> cache;
    std::lock_guard lock(mu);
    auto& list = cache[p];
    while (list.size() <= index) {
        const auto up = static_cast<Residue>(p);
        Residue q = list.empty() ? (kAuxPrimeFloor / up + 1) * up + 1 : list.back().q + up;
        while (!is_prime(static_cast<std::int64_t>(q))) q += up;
        list.push_back(detail::make_aux_prime(p, q));
    }
    return list[index];
}

/// The `index`-th largest prime below 2^31, for integer determinants.
inline Residue word_prime(std::size_t index) {
    static std::mutex mu;
    static std::vector<Residue> primes;
    std::lock_guard lock(mu);
    Residue q = primes.empty() ? (Residue{1} << 31) - 1 : primes.back() - 2;
    while (primes.size() <= index) {
        while (!is_prime(static_cast<std::int64_t>(q))) q -= 2;
        primes.push_back(q);
        q -= 2;
    }
    return primes[index];
}

inline Residue reduce(const BigInt& x, Residue q) {
    return mpz_fdiv_ui(x.get_mpz_t(), static_cast<unsigned long>(q));
}

/// Values of sum_i c_i x^i at x = root^k for k = 1..p-1 (entry k-1).
inline std::vector<Residue> eval_at_roots(std::span<const Residue> coeffs, const AuxPrime& aux) {
    const std::size_t p = aux.powers.size();
    std::vector<Residue> out(p - 1, 0);
    for (std::size_t k = 1; k < p; ++k) {
        unsigned __int128 acc = 0;
        std::size_t e = 0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] != 0) acc += static_cast<unsigned __int128>(coeffs[i]) * aux.powers[e];
            e += k;
            if (e >= p) e -= p;
        }
        out[k - 1] = static_cast<Residue>(acc % aux.q);
    }
    return out;
}

/// Inverse of eval_at_roots: the unique c_0..c_{p-2} with the given values.
/// With F(1) eliminated through c_{p-1} = 0 the inverse DFT of length p gives
///   c_i = p^{-1} * sum_{k=1}^{p-1} v_k (root^{-ik} - root^{k}).
inline std::vector<Residue> interpolate(std::span<const Residue> values, const AuxPrime& aux) {
    const std::size_t p = aux.powers.size();
    const Residue q = aux.q;
    const Residue p_inv = inv_mod(p % q, q);
    std::vector<Residue> out(p - 1, 0);
    for (std::size_t i = 0; i + 1 < p; ++i) {
        unsigned __int128 acc = 0;
        for (std::size_t k = 1; k < p; ++k) {
            const Residue v = values[k - 1];
            if (v == 0) continue;
            const std::size_t neg = (p - (i * k) % p) % p;
            const Residue w = (aux.powers[neg] + q - aux.powers[k]) % q;
            acc += static_cast<unsigned __int128>(v) * w;
        }
        out[i] = mul_mod(static_cast<Residue>(acc % q), p_inv, q);
    }
    return out;
}

/// Determinant of a dense n x n matrix over F_q (row-major), by elimination.
inline Residue det_mod(std::vector<Residue> a, std::size_t n, Residue q) {
    Residue det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv * n + col] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            det = (q - det) % q;
        }
        const Residue pv = a[col * n + col];
        det = mul_mod(det, pv, q);
        const Residue inv = inv_mod(pv, q);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Residue f = mul_mod(a[r * n + col], inv, q);
            if (f == 0) continue;
            for (std::size_t c = col; c < n; ++c) {
                a[r * n + c] = (a[r * n + c] + q - mul_mod(f, a[col * n + c], q)) % q;
            }
        }
    }
    return det;
}

/// Incremental Chinese remaindering of a vector of integers, reconstructed in
/// the symmetric range (-M/2, M/2].
class CrtVector {
public:
    explicit CrtVector(std::size_t len) : residues_(len, 0), modulus_(1) {}

    /// Folds in one more prime. Returns true iff the symmetric reconstruction
    /// is unchanged by it (the new prime confirms the previous value).
    bool add(Residue q, std::span<const Residue> values) {
        const BigInt old_half = modulus_ / 2;
        bool stable = modulus_ > 1;
        const Residue m_mod_q = reduce(modulus_, q);
        const Residue m_inv = inv_mod(m_mod_q, q);
        BigInt step;
        for (std::size_t i = 0; i < residues_.size(); ++i) {
            auto& x = residues_[i];
            const Residue xq = reduce(x, q);
            const Residue t = mul_mod((values[i] + q - xq) % q, m_inv, q);
            if (stable) {
                // |old_sym| <= M/2, so it stays the symmetric lift mod M*q
                // exactly when it already matches the new residue.
                const BigInt old_sym = x > old_half ? BigInt(x - modulus_) : x;
                if (reduce(old_sym, q) != values[i]) stable = false;
            }
            step = modulus_ * static_cast<unsigned long>(t);
            x += step;
        }
        modulus_ *= static_cast<unsigned long>(q);
        ++primes_used_;
        return stable;
    }

    [[nodiscard]] std::vector<BigInt> symmetric() const {
        std::vector<BigInt> out;
        out.reserve(residues_.size());
        const BigInt half = modulus_ / 2;
        for (const auto& x : residues_) out.push_back(x > half ? BigInt(x - modulus_) : x);
        return out;
    }

    [[nodiscard]] const BigInt& modulus() const { return modulus_; }
    [[nodiscard]] std::size_t primes_used() const { return primes_used_; }

private:
    std::vector<BigInt> residues_;
    BigInt modulus_;
    std::size_t primes_used_ = 0;
};

}  // namespace cyclodet::modular
