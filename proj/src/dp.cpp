#include "medhe/dp.hpp"

#include <cmath>
#include <limits>

#include "medhe/errors.hpp"
#include "medhe/rng.hpp"

namespace medhe {

namespace {

double log_by(double x, LogConvention c) {
    return c == LogConvention::natural ? std::log(x) : std::log10(x);
}

}  // namespace

std::string to_string(LogConvention c) {
    return c == LogConvention::natural ? "natural" : "base10";
}

void DpConfig::validate() const {
    if (sensitivity <= 0.0) throw ConfigError("sensitivity must be positive");
    if (sigma < 0.0) throw ConfigError("sigma must be non-negative");
    if (delta <= 0.0 || delta >= 1.0) throw ConfigError("delta must lie in (0, 1)");
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (sparsity < 0.0 || sparsity > 1.0) throw ConfigError("sparsity must lie in [0, 1]");
}

SparseGradient clip_gradient(const SparseGradient& g, double sensitivity) {
    if (sensitivity <= 0.0) throw ContractViolation("clip_gradient: sensitivity must be positive");
    double norm_sq = 0.0;
    for (double v : g.values) norm_sq += v * v;
    double norm = std::sqrt(norm_sq);
    if (norm <= sensitivity) return g;

    SparseGradient out = g;
    const double factor = sensitivity / norm;
    for (auto& v : out.values) v *= factor;
    out.refresh_nnz();
    return out;
}

SparseGradient add_gaussian_noise(const SparseGradient& g, double sigma, uint64_t seed) {
    if (sigma < 0.0) throw ContractViolation("add_gaussian_noise: sigma must be non-negative");
    if (sigma == 0.0) return g;

    SparseGradient out = g;
    Rng rng(derive_seed(seed, 0x6e6f697365ULL));
    for (auto& v : out.values) {
        if (v != 0.0) v += sigma * rng.next_gaussian();
    }
    out.refresh_nnz();
    return out;
}

PrivacySpend epsilon_for(const DpConfig& config) {
    config.validate();
    PrivacySpend spend;
    spend.delta = config.delta;

    const double retained = 1.0 - config.sparsity;
    if (retained == 0.0) {
        // s = 1: no coordinate is ever released.
        spend.epsilon = 0.0;
        spend.per_round_epsilon = 0.0;
        return spend;
    }
    if (config.sigma == 0.0) {
        spend.epsilon = std::numeric_limits<double>::infinity();
        spend.per_round_epsilon = std::numeric_limits<double>::infinity();
        return spend;
    }

    const double d2 = config.sensitivity;
    const double sigma = config.sigma;
    const double t = static_cast<double>(config.rounds);
    const double log_inv_delta = log_by(1.0 / config.delta, config.log_convention);

    const double linear = d2 * std::sqrt(2.0 * t * log_inv_delta) / sigma;
    if (config.variant == EpsilonVariant::theorem_statement) {
        spend.epsilon = retained * (linear + d2 * d2 * t / (2.0 * sigma * sigma));
    } else {
        spend.epsilon =
            retained * linear + retained * retained * d2 * d2 * t / (sigma * sigma);
    }

    // Single-round Gaussian mechanism at the delta split delta0 = delta/(2T).
    const double delta0 = config.delta / (2.0 * t);
    spend.per_round_epsilon =
        (d2 / sigma) * std::sqrt(2.0 * log_by(1.25 / delta0, config.log_convention));
    return spend;
}

double sigma_for_epsilon(double epsilon_target, double sparsity, double sensitivity,
                         uint64_t rounds) {
    if (epsilon_target <= 0.0)
        throw ContractViolation("sigma_for_epsilon: epsilon target must be positive");
    if (sparsity < 0.0 || sparsity > 1.0)
        throw ContractViolation("sigma_for_epsilon: sparsity must lie in [0, 1]");
    return (1.0 - sparsity) * sensitivity * std::sqrt(static_cast<double>(rounds)) /
           std::sqrt(2.0 * epsilon_target);
}

}  // namespace medhe
