#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace medhe {

// Modular arithmetic on 64-bit words via 128-bit intermediates.

inline uint64_t add_mod(uint64_t a, uint64_t b, uint64_t q) {
    uint64_t s = a + b;
    if (s >= q || s < a) s -= q;
    return s;
}

inline uint64_t sub_mod(uint64_t a, uint64_t b, uint64_t q) {
    return a >= b ? a - b : a + q - b;
}

inline uint64_t mul_mod(uint64_t a, uint64_t b, uint64_t q) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q);
uint64_t inv_mod(uint64_t a, uint64_t q);

/// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime_u64(uint64_t n);

/// Largest prime below 2^bits congruent to 1 mod 2n (NTT-friendly for the
/// negacyclic ring of degree n). Throws ConfigError when none exists.
uint64_t find_ntt_prime(int bits, size_t n);

/// Number-theoretic transform over Z_q[X]/(X^n + 1). The psi-twisting for
/// the negacyclic ring is folded into the butterfly tables, so
/// forward -> pointwise multiply -> inverse computes negacyclic convolution.
class NegacyclicNtt {
public:
    NegacyclicNtt(size_t n, uint64_t q);

    size_t degree() const { return n_; }
    uint64_t modulus() const { return q_; }

    void forward(std::vector<uint64_t>& a) const;
    void inverse(std::vector<uint64_t>& a) const;

    /// Negacyclic product of two coefficient-domain polynomials.
    std::vector<uint64_t> multiply(const std::vector<uint64_t>& a,
                                   const std::vector<uint64_t>& b) const;

private:
    size_t n_;
    int log_n_;
    uint64_t q_;
    uint64_t n_inv_;
    std::vector<uint64_t> psi_rev_;      // psi^bitrev(i)
    std::vector<uint64_t> psi_inv_rev_;  // psi^-bitrev(i)
};

}  // namespace medhe
