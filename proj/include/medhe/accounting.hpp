#pragma once

#include <cstdint>

#include "medhe/he.hpp"

namespace medhe {

/// Closed-form communication accounting. All byte counts are exact
/// integers; MB figures are produced only at display time by the rounding
/// helpers below.
struct CommBreakdown {
    uint64_t d = 0;
    double sparsity = 0.0;
    uint64_t k = 0;                       ///< floor((1-s)*d), exact rational arithmetic
    uint64_t slots_effective = 0;         ///< slots per ciphertext x lanes per slot
    uint64_t ciphertexts = 0;
    uint64_t ciphertext_bytes = 0;        ///< 2*N*q_bits/8
    uint64_t encrypted_bytes_per_client = 0;
    uint64_t baseline_bytes_per_client = 0;  ///< d * 4 (float32 dense upload)
    uint64_t index_overhead_bytes = 0;    ///< modelled varint bytes, reported separately
    int n_clients = 1;
    SlotModel slot_model = SlotModel::paper_N;

    uint64_t encrypted_bytes_total() const { return encrypted_bytes_per_client * n_clients; }
    uint64_t baseline_bytes_total() const { return baseline_bytes_per_client * n_clients; }

    /// (baseline - encrypted) / baseline, as exact permille rounded to nearest.
    uint64_t reduction_permille() const;
    /// baseline_total / encrypted_total rounded to the nearest integer ("42x").
    uint64_t compression_ratio_x() const;
};

/// floor((1 - s) * d) with s read as a rational over 10^9, so decimal
/// sparsity levels reproduce the published integer k exactly.
uint64_t retained_count(uint64_t d, double sparsity);

/// MB rounded to one decimal, returned in tenths (exact integer rounding).
uint64_t mb_tenths(uint64_t bytes);
/// MB rounded to two decimals, returned in hundredths.
uint64_t mb_hundredths(uint64_t bytes);

CommBreakdown communication_breakdown(uint64_t d, double sparsity, int n_clients,
                                      const CkksParams& params, const PackingConfig& pc,
                                      SlotModel slot_model);

/// Modelled cleartext index side channel: k varint-encoded gaps of average
/// size d/k. Deterministic stand-in for measured bytes.
uint64_t modelled_index_bytes(uint64_t d, uint64_t k);

}  // namespace medhe
