#pragma once

#include <cstdint>
#include <string>

#include "medhe/sparsifier.hpp"

namespace medhe {

enum class LogConvention { natural, base10 };

/// Which composition bound to evaluate: the stated bound scales both terms
/// by (1-s); its derivation squares (1-s) on the quadratic term and drops
/// the 1/2. The two are not equivalent, so both are available.
enum class EpsilonVariant { theorem_statement, proof_quadratic };

std::string to_string(LogConvention c);

struct DpConfig {
    double sensitivity = 1.0;  ///< L2 clip bound
    double sigma = 0.0;        ///< Gaussian noise stddev
    double delta = 1e-5;
    uint64_t rounds = 1;       ///< T
    double sparsity = 0.0;     ///< s
    LogConvention log_convention = LogConvention::natural;
    EpsilonVariant variant = EpsilonVariant::theorem_statement;

    void validate() const;
};

struct PrivacySpend {
    double epsilon = 0.0;
    double delta = 0.0;
    double per_round_epsilon = 0.0;  ///< single-round Gaussian-mechanism epsilon
};

/// L2 clipping: scales the whole vector by sensitivity/norm when the norm
/// exceeds the bound; zeros stay zero.
SparseGradient clip_gradient(const SparseGradient& g, double sensitivity);

/// Gaussian noise on the retained (nonzero) coordinates only; the sparsity
/// pattern is preserved. sigma = 0 returns the input unchanged.
SparseGradient add_gaussian_noise(const SparseGradient& g, double sigma, uint64_t seed);

/// Advanced-composition epsilon across T rounds with sparsification
/// amplification. sigma = 0 yields an infinite-epsilon signal; s = 1 yields
/// epsilon = 0 (nothing is released).
PrivacySpend epsilon_for(const DpConfig& config);

/// Noise floor for a target epsilon: (1-s) * sensitivity * sqrt(T) / sqrt(2*eps).
double sigma_for_epsilon(double epsilon_target, double sparsity, double sensitivity,
                         uint64_t rounds);

}  // namespace medhe
