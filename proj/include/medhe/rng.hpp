#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace medhe {

// Self-contained deterministic random number generation. The standard
// library distributions are implementation-defined, so every sampler the
// simulator relies on is spelled out here; identical seeds give identical
// streams on every platform.

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Non-deterministic seed from OS entropy, for callers that explicitly want
/// fresh randomness (e.g. production encryption). Never used by tests or the
/// default simulation paths, which stay reproducible.
uint64_t entropy_seed();

/// Mixes a base seed with a purpose tag and counter to derive independent
/// sub-streams (per client, per round, per operation).
inline uint64_t derive_seed(uint64_t base, uint64_t tag, uint64_t counter = 0) {
    uint64_t s = base;
    uint64_t a = splitmix64(s);
    s ^= tag * 0xD1342543DE82EF95ULL;
    uint64_t b = splitmix64(s);
    s ^= counter * 0xA0761D6478BD642FULL;
    uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ (c >> 1);
}

/// xoshiro256** seeded via splitmix64.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    uint64_t next_u64() {
        uint64_t result = rotl(state_[1] * 5, 7) * 9;
        uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection; exact for any bound > 0.
    uint64_t next_below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller (pairs cached).
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    /// Uniform over {-1, 0, 1}.
    int next_ternary() { return static_cast<int>(next_below(3)) - 1; }

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 handled by boosting.
    double next_gamma(double shape) {
        if (shape < 1.0) {
            double u;
            do {
                u = next_double();
            } while (u <= 0.0);
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = next_gaussian();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Dirichlet(alpha) over n components.
    std::vector<double> next_dirichlet(double alpha, size_t n) {
        std::vector<double> g(n);
        double sum = 0.0;
        for (auto& gi : g) {
            gi = next_gamma(alpha);
            sum += gi;
        }
        if (sum <= 0.0) {
            // Degenerate draw (all gammas underflowed); fall back to uniform.
            for (auto& gi : g) gi = 1.0 / static_cast<double>(n);
            return g;
        }
        for (auto& gi : g) gi /= sum;
        return g;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4] = {};
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace medhe
