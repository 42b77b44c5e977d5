#include "medhe/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "medhe/errors.hpp"
#include "medhe/rng.hpp"
#include "medhe/sparsifier.hpp"

namespace medhe {

double QuadraticProblem::smoothness() const {
    double l = 0.0;
    for (double h : hessian_diag) l = std::max(l, h);
    return l;
}

double QuadraticProblem::value(const std::vector<double>& w) const {
    double f = 0.0;
    for (size_t i = 0; i < dim(); ++i) {
        double r = w[i] - optimum[i];
        f += 0.5 * hessian_diag[i] * r * r;
    }
    return f;
}

std::vector<double> QuadraticProblem::gradient(const std::vector<double>& w) const {
    std::vector<double> g(dim());
    for (size_t i = 0; i < dim(); ++i) g[i] = hessian_diag[i] * (w[i] - optimum[i]);
    return g;
}

QuadraticProblem QuadraticProblem::random(size_t dim, double noise_level, uint64_t seed) {
    QuadraticProblem p;
    p.noise_level = noise_level;
    p.hessian_diag.resize(dim);
    p.optimum.resize(dim);
    Rng rng(derive_seed(seed, 0x71756164ULL));
    for (size_t i = 0; i < dim; ++i) {
        p.hessian_diag[i] = 0.1 + 0.9 * rng.next_double();  // spectrum in [0.1, 1]
        p.optimum[i] = 2.0 * rng.next_gaussian();
    }
    return p;
}

SgdRun run_sparse_sgd(const QuadraticProblem& problem, const SparseSgdOptions& opts) {
    if (problem.dim() == 0) throw ContractViolation("run_sparse_sgd: empty problem");
    if (opts.steps < 1) throw ContractViolation("run_sparse_sgd: steps must be >= 1");
    const double l = problem.smoothness();
    if (opts.lr <= 0.0 || opts.lr > 1.0 / l)
        throw ContractViolation("run_sparse_sgd: lr must lie in (0, 1/L]");

    SparsifierConfig sc;
    sc.sparsity = opts.sparsity;
    sc.adaptation_rate = opts.adaptation_rate;
    sc.adaptive_threshold = opts.adaptive_threshold;
    sc.error_feedback = opts.error_feedback;
    SparsifierState state = SparsifierState::initial(problem.dim());

    Rng noise_rng(derive_seed(opts.seed, 0x67726164ULL));
    std::vector<double> w(problem.dim(), 0.0);

    SgdRun run;
    run.suboptimality.reserve(static_cast<size_t>(opts.steps));
    for (int t = 1; t <= opts.steps; ++t) {
        std::vector<double> g = problem.gradient(w);
        if (problem.noise_level > 0.0)
            for (auto& gi : g) gi += problem.noise_level * noise_rng.next_gaussian();

        SparsifyResult res = sparsify(g, sc, state);
        state = std::move(res.state);

        double eta = opts.sqrt_decay ? opts.lr / std::sqrt(static_cast<double>(t)) : opts.lr;
        for (size_t i = 0; i < w.size(); ++i) w[i] -= eta * res.sparse.values[i];

        double f = problem.value(w);
        run.suboptimality.push_back(f);
        if (!std::isfinite(f) || f > 1e12) {
            run.diverged = true;
            break;
        }
    }
    return run;
}

RateFit fit_convergence_rate(const std::vector<double>& losses) {
    RateFit fit;
    if (losses.size() < 100) return fit;
    const size_t begin = losses.size() / 2;  // tail only

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = 0;
    for (size_t t = begin; t < losses.size(); ++t) {
        if (losses[t] <= 0.0) return fit;  // log undefined; fit skipped
        double x = std::log(static_cast<double>(t + 1));
        double y = std::log(losses[t]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / static_cast<double>(n);
    fit.valid = true;
    return fit;
}

}  // namespace medhe
