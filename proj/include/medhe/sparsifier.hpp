#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace medhe {

/// Adaptive top-k sparsification with error feedback and EMA threshold
/// smoothing. One SparsifierState per client, carried across rounds.

struct SparsifierConfig {
    double sparsity = 0.9;         ///< s: fraction of entries zeroed
    double adaptation_rate = 0.7;  ///< alpha: EMA rate for the threshold

    // Ablation switches. With adaptive_threshold off the mask uses the raw
    // per-round top-k cutoff; with error_feedback off the error memory is
    // discarded instead of carried forward.
    bool adaptive_threshold = true;
    bool error_feedback = true;

    void validate() const;
};

struct SparsifierState {
    double threshold = 0.0;             ///< tau_t after the last completed round
    std::vector<double> error_memory;   ///< e_t, dimension d
    uint64_t round_index = 0;           ///< completed rounds t

    static SparsifierState initial(size_t dim);
};

struct SparseGradient {
    std::vector<double> values;  ///< dense layout, zeros at pruned positions
    size_t nnz = 0;              ///< count of nonzero entries
    size_t dense_dim = 0;

    /// Recomputes nnz from values; call after mutating values in place.
    void refresh_nnz();
};

struct SparsifyResult {
    SparseGradient sparse;
    SparsifierState state;
};

/// k-th largest absolute value of `values` (1-based k), expected linear time.
double select_kth_magnitude(const std::vector<double>& values, size_t k);

/// One sparsification round:
///   compensated = gradient + error_memory
///   tau_current = k-th largest |compensated|, k = floor((1-s)*d)
///   tau_t       = tau_current on the first round, EMA afterwards
///   mask        = |compensated| >= tau_t
///   error_out   = compensated - sparse
/// k = 0 transmits nothing and carries everything in the error memory.
SparsifyResult sparsify(const std::vector<double>& gradient,
                        const SparsifierConfig& config,
                        const SparsifierState& state);

}  // namespace medhe
