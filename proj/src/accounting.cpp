#include "medhe/accounting.hpp"

#include <cmath>

#include "medhe/errors.hpp"

namespace medhe {

namespace {

constexpr uint64_t kMb = 1024 * 1024;
constexpr uint64_t kSparsityDen = 1000000000ULL;

uint64_t div_round_nearest(unsigned __int128 num, unsigned __int128 den) {
    return static_cast<uint64_t>((num + den / 2) / den);
}

}  // namespace

uint64_t retained_count(uint64_t d, double sparsity) {
    if (sparsity < 0.0 || sparsity > 1.0) throw ConfigError("sparsity must lie in [0, 1]");
    auto s_num = static_cast<uint64_t>(std::llround(sparsity * static_cast<double>(kSparsityDen)));
    unsigned __int128 kept = static_cast<unsigned __int128>(d) * (kSparsityDen - s_num);
    return static_cast<uint64_t>(kept / kSparsityDen);
}

uint64_t mb_tenths(uint64_t bytes) {
    return div_round_nearest(static_cast<unsigned __int128>(bytes) * 10, kMb);
}

uint64_t mb_hundredths(uint64_t bytes) {
    return div_round_nearest(static_cast<unsigned __int128>(bytes) * 100, kMb);
}

uint64_t CommBreakdown::reduction_permille() const {
    uint64_t base = baseline_bytes_per_client;
    if (base == 0) return 0;
    uint64_t saved = base > encrypted_bytes_per_client ? base - encrypted_bytes_per_client : 0;
    return div_round_nearest(static_cast<unsigned __int128>(saved) * 1000, base);
}

uint64_t CommBreakdown::compression_ratio_x() const {
    uint64_t enc = encrypted_bytes_total();
    if (enc == 0) return 0;
    return div_round_nearest(baseline_bytes_total(), enc);
}

uint64_t modelled_index_bytes(uint64_t d, uint64_t k) {
    if (k == 0) return 0;
    uint64_t avg_gap = (d + k - 1) / k;
    int bits = 1;
    while ((uint64_t{1} << bits) <= avg_gap && bits < 63) ++bits;
    uint64_t bytes_per_index = (static_cast<uint64_t>(bits) + 6) / 7;
    return k * bytes_per_index;
}

CommBreakdown communication_breakdown(uint64_t d, double sparsity, int n_clients,
                                      const CkksParams& params, const PackingConfig& pc,
                                      SlotModel slot_model) {
    if (n_clients < 1) throw ConfigError("n_clients must be >= 1");
    params.validate();

    CommBreakdown br;
    br.d = d;
    br.sparsity = sparsity;
    br.n_clients = n_clients;
    br.slot_model = slot_model;
    br.k = retained_count(d, sparsity);
    br.slots_effective = effective_slots_per_ciphertext(params, slot_model) *
                         static_cast<uint64_t>(pc.lanes_per_slot);
    br.ciphertexts = br.k == 0 ? 0 : (br.k + br.slots_effective - 1) / br.slots_effective;
    br.ciphertext_bytes = params.ciphertext_bytes();
    br.encrypted_bytes_per_client = br.ciphertexts * br.ciphertext_bytes;
    br.baseline_bytes_per_client = d * 4;
    br.index_overhead_bytes = modelled_index_bytes(d, br.k);
    return br;
}

}  // namespace medhe
