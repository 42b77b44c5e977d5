#include "medhe/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "medhe/errors.hpp"

namespace medhe {

void SparsifierConfig::validate() const {
    if (sparsity < 0.0 || sparsity > 1.0)
        throw ConfigError("sparsity must lie in [0, 1], got " + std::to_string(sparsity));
    if (adaptation_rate <= 0.0 || adaptation_rate >= 1.0)
        throw ConfigError("adaptation_rate must lie in (0, 1), got " +
                          std::to_string(adaptation_rate));
}

SparsifierState SparsifierState::initial(size_t dim) {
    SparsifierState st;
    st.threshold = 0.0;
    st.error_memory.assign(dim, 0.0);
    st.round_index = 0;
    return st;
}

void SparseGradient::refresh_nnz() {
    nnz = 0;
    for (double v : values)
        if (v != 0.0) ++nnz;
}

double select_kth_magnitude(const std::vector<double>& values, size_t k) {
    if (k < 1 || k > values.size())
        throw ContractViolation("select_kth_magnitude: k=" + std::to_string(k) +
                                " out of range for length " + std::to_string(values.size()));
    std::vector<double> mags(values.size());
    for (size_t i = 0; i < values.size(); ++i) mags[i] = std::fabs(values[i]);
    std::nth_element(mags.begin(), mags.begin() + static_cast<ptrdiff_t>(k - 1), mags.end(),
                     std::greater<double>());
    return mags[k - 1];
}

SparsifyResult sparsify(const std::vector<double>& gradient, const SparsifierConfig& config,
                        const SparsifierState& state) {
    config.validate();
    const size_t d = gradient.size();
    if (state.error_memory.size() != d)
        throw ContractViolation("sparsify: gradient length " + std::to_string(d) +
                                " does not match error memory length " +
                                std::to_string(state.error_memory.size()));

    SparsifyResult out;
    out.sparse.dense_dim = d;
    out.sparse.values.assign(d, 0.0);
    out.state = state;
    out.state.round_index = state.round_index + 1;
    out.state.error_memory.assign(d, 0.0);

    std::vector<double> compensated(d);
    for (size_t i = 0; i < d; ++i)
        compensated[i] = gradient[i] + (config.error_feedback ? state.error_memory[i] : 0.0);

    const size_t k = static_cast<size_t>(std::floor((1.0 - config.sparsity) * static_cast<double>(d)));

    double tau_current;
    if (k == 0) {
        // s = 1: nothing leaves the client; everything is carried forward.
        tau_current = std::numeric_limits<double>::infinity();
    } else {
        tau_current = select_kth_magnitude(compensated, k);
    }

    if (k == d) {
        // s = 0 is an exact pass-through; the EMA must not prune anything.
        out.state.threshold = tau_current;
        out.sparse.values = std::move(compensated);
        out.sparse.refresh_nnz();
        return out;
    }

    const bool first_round = state.round_index == 0;
    double tau;
    if (!config.adaptive_threshold || first_round) {
        tau = tau_current;
    } else {
        tau = config.adaptation_rate * state.threshold +
              (1.0 - config.adaptation_rate) * tau_current;
    }
    out.state.threshold = tau;

    size_t nnz = 0;
    for (size_t i = 0; i < d; ++i) {
        if (std::fabs(compensated[i]) >= tau) {
            out.sparse.values[i] = compensated[i];
            if (compensated[i] != 0.0) ++nnz;
        } else if (config.error_feedback) {
            out.state.error_memory[i] = compensated[i];
        }
    }
    out.sparse.nnz = nnz;
    return out;
}

}  // namespace medhe
