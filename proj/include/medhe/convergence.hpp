#pragma once

#include <cstdint>
#include <vector>

namespace medhe {

/// Diagonal quadratic with known optimum: f(w) = 1/2 * sum h_i (w_i - o_i)^2,
/// f* = 0, L = max h_i. Optional additive Gaussian gradient noise.
struct QuadraticProblem {
    std::vector<double> hessian_diag;
    std::vector<double> optimum;
    double noise_level = 0.0;

    size_t dim() const { return hessian_diag.size(); }
    double smoothness() const;
    double value(const std::vector<double>& w) const;
    std::vector<double> gradient(const std::vector<double>& w) const;

    static QuadraticProblem random(size_t dim, double noise_level, uint64_t seed);
};

struct SparseSgdOptions {
    double sparsity = 0.9;
    bool error_feedback = true;
    bool adaptive_threshold = true;
    double adaptation_rate = 0.7;
    int steps = 1000;
    double lr = 0.1;
    /// eta_t = lr / sqrt(t); the standard schedule for the stochastic runs.
    bool sqrt_decay = false;
    uint64_t seed = 42;
};

struct SgdRun {
    std::vector<double> suboptimality;  ///< f(w_t) - f* per step
    bool diverged = false;              ///< loss crossed 1e12; trajectory truncated
};

/// Gradient descent where each step's (optionally noisy) gradient passes
/// through the sparsifier. Requires lr <= 1/L.
SgdRun run_sparse_sgd(const QuadraticProblem& problem, const SparseSgdOptions& opts);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool valid = false;
};

/// Least-squares slope of log(loss) vs log(t) over the trajectory tail.
/// Skipped (valid=false) when the tail contains non-positive losses.
RateFit fit_convergence_rate(const std::vector<double>& losses);

}  // namespace medhe
