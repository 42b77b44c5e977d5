#include "medhe/ntt.hpp"

#include <string>

#include "medhe/errors.hpp"

namespace medhe {

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t q) {
    uint64_t acc = 1;
    uint64_t cur = base % q;
    while (exp != 0) {
        if (exp & 1) acc = mul_mod(acc, cur, q);
        cur = mul_mod(cur, cur, q);
        exp >>= 1;
    }
    return acc;
}

uint64_t inv_mod(uint64_t a, uint64_t q) {
    // q prime; Fermat inverse.
    return pow_mod(a, q - 2, q);
}

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    // This base set is deterministic for all 64-bit inputs.
    for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < r - 1; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

uint64_t find_ntt_prime(int bits, size_t n) {
    if (bits < 20 || bits > 62) throw ConfigError("NTT prime width must be in [20, 62] bits");
    const uint64_t step = 2 * static_cast<uint64_t>(n);
    uint64_t candidate = (uint64_t{1} << bits) - step + 1;  // largest value ≡ 1 mod 2n below 2^bits
    while (candidate > step) {
        if (is_prime_u64(candidate)) return candidate;
        candidate -= step;
    }
    throw ConfigError("no NTT-friendly prime of " + std::to_string(bits) + " bits for n=" +
                      std::to_string(n));
}

namespace {

int log2_exact(size_t n) {
    int l = 0;
    while ((size_t{1} << l) < n) ++l;
    return l;
}

uint32_t bit_reverse(uint32_t x, int bits) {
    uint32_t r = 0;
    for (int i = 0; i < bits; ++i) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

}  // namespace

NegacyclicNtt::NegacyclicNtt(size_t n, uint64_t q) : n_(n), q_(q) {
    if (n < 2 || (n & (n - 1)) != 0) throw ConfigError("ring degree must be a power of two >= 2");
    if (!is_prime_u64(q)) throw ConfigError("NTT modulus must be prime");
    if ((q - 1) % (2 * n) != 0)
        throw ConfigError("NTT modulus must be 1 mod 2n for negacyclic transforms");
    log_n_ = log2_exact(n);
    n_inv_ = inv_mod(static_cast<uint64_t>(n), q);

    // psi: primitive 2n-th root of unity. Candidates g^((q-1)/2n) have order
    // dividing 2n (a power of two), so psi^n != 1 certifies order exactly 2n.
    uint64_t psi = 0;
    for (uint64_t g = 2;; ++g) {
        uint64_t cand = pow_mod(g, (q - 1) / (2 * static_cast<uint64_t>(n)), q);
        if (cand != 0 && pow_mod(cand, static_cast<uint64_t>(n), q) == q - 1) {
            psi = cand;
            break;
        }
        if (g > 1000) throw ConfigError("failed to find a primitive 2n-th root of unity");
    }
    uint64_t psi_inv = inv_mod(psi, q);

    psi_rev_.resize(n);
    psi_inv_rev_.resize(n);
    uint64_t power = 1, power_inv = 1;
    for (size_t i = 0; i < n; ++i) {
        uint32_t rev = bit_reverse(static_cast<uint32_t>(i), log_n_);
        psi_rev_[rev] = power;
        psi_inv_rev_[rev] = power_inv;
        power = mul_mod(power, psi, q);
        power_inv = mul_mod(power_inv, psi_inv, q);
    }
}

void NegacyclicNtt::forward(std::vector<uint64_t>& a) const {
    if (a.size() != n_) throw ContractViolation("NTT input length mismatch");
    size_t t = n_;
    for (size_t m = 1; m < n_; m <<= 1) {
        t >>= 1;
        for (size_t i = 0; i < m; ++i) {
            size_t j1 = 2 * i * t;
            uint64_t s = psi_rev_[m + i];
            for (size_t j = j1; j < j1 + t; ++j) {
                uint64_t u = a[j];
                uint64_t v = mul_mod(a[j + t], s, q_);
                a[j] = add_mod(u, v, q_);
                a[j + t] = sub_mod(u, v, q_);
            }
        }
    }
}

void NegacyclicNtt::inverse(std::vector<uint64_t>& a) const {
    if (a.size() != n_) throw ContractViolation("NTT input length mismatch");
    size_t t = 1;
    for (size_t m = n_; m > 1; m >>= 1) {
        size_t j1 = 0;
        size_t h = m >> 1;
        for (size_t i = 0; i < h; ++i) {
            uint64_t s = psi_inv_rev_[h + i];
            for (size_t j = j1; j < j1 + t; ++j) {
                uint64_t u = a[j];
                uint64_t v = a[j + t];
                a[j] = add_mod(u, v, q_);
                a[j + t] = mul_mod(sub_mod(u, v, q_), s, q_);
            }
            j1 += 2 * t;
        }
        t <<= 1;
    }
    for (auto& x : a) x = mul_mod(x, n_inv_, q_);
}

std::vector<uint64_t> NegacyclicNtt::multiply(const std::vector<uint64_t>& a,
                                              const std::vector<uint64_t>& b) const {
    std::vector<uint64_t> fa = a, fb = b;
    forward(fa);
    forward(fb);
    for (size_t i = 0; i < n_; ++i) fa[i] = mul_mod(fa[i], fb[i], q_);
    inverse(fa);
    return fa;
}

}  // namespace medhe
