#pragma once

#include <cstdint>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "medhe/ntt.hpp"

namespace medhe {

/// How many usable slots a ciphertext is assumed to carry when counting
/// ciphertexts. paper_N reproduces the published arithmetic (N slots);
/// standard_N_half is the conventional CKKS slot count (N/2).
enum class SlotModel { paper_N, standard_N_half };

enum class SecurityClaim { paper_128bit, desk_insecure };

std::string to_string(SlotModel m);
std::string to_string(SecurityClaim c);

struct CkksParams {
    size_t ring_dimension = 1024;  ///< N, power of two
    int q_bits = 61;               ///< total coefficient modulus bits
    int scale_log2 = 40;           ///< Delta = 2^scale_log2
    double noise_stddev = 3.2;     ///< error distribution width

    size_t slot_count() const { return ring_dimension / 2; }
    double scale() const;

    /// Exact serialized payload size: 2*N*q_bits/8 bytes.
    uint64_t ciphertext_bytes() const;

    /// Only the published (N=8192, q=240 bit) set carries the 128-bit claim;
    /// every desk set is tagged insecure.
    SecurityClaim security_claim() const;

    /// Single-prime backends cover at most 62 modulus bits; wider sets are
    /// accepted for size accounting only.
    bool crypto_supported() const { return q_bits >= 30 && q_bits <= 61; }

    void validate() const;
};

/// Fixed-point multi-lane packing: B quantized values per slot in base
/// 2^(lane_bits+guard_bits) positional encoding. Guard bits give headroom so
/// lane-wise sums over up to 2^guard_bits clients cannot spill into the
/// neighbouring lane.
struct PackingConfig {
    int lanes_per_slot = 2;  ///< B
    int lane_bits = 8;
    int guard_bits = 8;
    double clip_range = 1.0;

    int bits_per_lane() const { return lane_bits + guard_bits; }
    uint64_t max_code() const { return (uint64_t{1} << lane_bits) - 1; }
    double quant_step() const { return 2.0 * clip_range / static_cast<double>(max_code()); }

    void validate(const CkksParams& params, int n_clients) const;
};

/// Largest packed-integer width (bits) a slot can carry and still round-trip
/// exactly: limited by the ring range at scale Delta and by double-precision
/// FFT exactness.
int usable_slot_bits(const CkksParams& params);

struct SecretKey {
    std::vector<int8_t> coeffs;  // ternary
};

struct PublicKey {
    std::vector<uint64_t> b;  // -a*s + e
    std::vector<uint64_t> a;
};

struct KeyPair {
    SecretKey secret_key;
    PublicKey public_key;
};

struct Plaintext {
    std::vector<uint64_t> coeffs;
    double scale = 0.0;
};

struct Ciphertext {
    std::vector<uint64_t> c0;
    std::vector<uint64_t> c1;
    double scale = 0.0;
    int level = 0;
    size_t slot_count = 0;
    size_t ring_dimension = 0;
    int q_bits = 0;

    uint64_t payload_bytes() const;
};

class CkksContext {
public:
    explicit CkksContext(const CkksParams& params);

    const CkksParams& params() const { return params_; }
    bool crypto_available() const { return ntt_ != nullptr; }
    uint64_t modulus() const;

    KeyPair keygen(uint64_t seed) const;

    /// Canonical-embedding encoding of up to N/2 real slot values at scale
    /// Delta. Magnitudes beyond q/(2*Delta) raise EncodingOverflowError.
    Plaintext encode(const std::vector<double>& values) const;
    std::vector<double> decode(const Plaintext& pt) const;

    Ciphertext encrypt(const Plaintext& pt, const PublicKey& pk, uint64_t seed) const;
    std::vector<double> decrypt(const Ciphertext& ct, const SecretKey& sk) const;

    /// Slotwise homomorphic addition. Mismatched scale/level/params raise
    /// ScaleMismatchError rather than corrupting silently.
    Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;

    /// Convenience: encode+encrypt of real slot values.
    Ciphertext encrypt_values(const std::vector<double>& values, const PublicKey& pk,
                              uint64_t seed) const;

private:
    CkksParams params_;
    uint64_t q_ = 0;
    std::unique_ptr<NegacyclicNtt> ntt_;

    std::vector<uint64_t> ring_mul(const std::vector<uint64_t>& a,
                                   const std::vector<uint64_t>& b) const;
    void require_crypto() const;
};

// ---- Lane packing (pure integer arithmetic once values are quantized) ----

/// Clip to [-clip, clip], quantize to lane_bits with the zero offset, and
/// pack B codes per slot. Output length = ceil(len / B); each double holds an
/// exact integer.
std::vector<double> pack_lanes(const std::vector<double>& values, const PackingConfig& pc,
                               const CkksParams& params, int n_clients);

/// Inverse of pack_lanes applied to a lane-wise SUM over n_summands packed
/// vectors: rounds each slot to the nearest integer, splits lanes, removes
/// the n_summands zero offsets, and de-quantizes. Returns per-coordinate
/// value sums of length original_len.
std::vector<double> unpack_lane_sums(const std::vector<double>& packed_sums, size_t original_len,
                                     const PackingConfig& pc, int n_summands);

/// Offset quantization code for a single value (exposed for tests).
uint64_t quantize_lane(double value, const PackingConfig& pc);

/// Number of ciphertexts needed for k retained values under the given slot
/// model and packing width.
uint64_t ciphertext_count(uint64_t k, const CkksParams& params, const PackingConfig& pc,
                          SlotModel slot_model);

/// Slots per ciphertext under the given model (N or N/2).
uint64_t effective_slots_per_ciphertext(const CkksParams& params, SlotModel slot_model);

// ---- Serialization ----
// 32-byte header (magic, version, slot model, N, q_bits, scale_log2, level,
// slot count) followed by bit-packed little-endian coefficient arrays; the
// coefficient payload is exactly 2*N*q_bits/8 bytes.

std::vector<uint8_t> serialize_ciphertext(const Ciphertext& ct, SlotModel slot_model);
Ciphertext deserialize_ciphertext(const std::vector<uint8_t>& bytes);

/// Varint-encoded sorted index deltas; the cleartext side channel used to
/// transmit sparse positions. Returns the encoded byte count.
std::vector<uint8_t> encode_index_deltas(const std::vector<uint32_t>& sorted_indices);
std::vector<uint32_t> decode_index_deltas(const std::vector<uint8_t>& bytes);

}  // namespace medhe
