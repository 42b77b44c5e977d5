#include "medhe/he.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>

#include "medhe/errors.hpp"
#include "medhe/rng.hpp"

namespace medhe {

namespace {

constexpr char kMagic[8] = {'M', 'E', 'D', 'H', 'E', 'C', 'T', '1'};
constexpr uint16_t kSerialVersion = 1;

// Seed tags for the independent randomness streams.
constexpr uint64_t kTagSecret = 0x7365637265ULL;
constexpr uint64_t kTagPkUniform = 0x756e6966ULL;
constexpr uint64_t kTagPkError = 0x706b657272ULL;
constexpr uint64_t kTagEncU = 0x656e6375ULL;
constexpr uint64_t kTagEncE0 = 0x656e6330ULL;
constexpr uint64_t kTagEncE1 = 0x656e6331ULL;

int log2_of_pow2(size_t n) {
    int l = 0;
    while ((size_t{1} << l) < n) ++l;
    return l;
}

// Radix-2 complex FFT with kernel exp(sign*2*pi*i*jk/n); no normalization.
void fft_inplace(std::vector<std::complex<double>>& a, double sign) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        for (size_t i = 0; i < n; i += len) {
            for (size_t j = 0; j < len / 2; ++j) {
                // Direct root evaluation keeps rounding error flat across stages.
                std::complex<double> w = std::polar(1.0, ang * static_cast<double>(j));
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

uint64_t mod_from_signed(int64_t r, uint64_t q) {
    if (r >= 0) return static_cast<uint64_t>(r) % q;
    uint64_t m = static_cast<uint64_t>(-r) % q;
    return m == 0 ? 0 : q - m;
}

std::vector<uint64_t> sample_ternary(Rng& rng, size_t n, uint64_t q) {
    std::vector<uint64_t> out(n);
    for (auto& x : out) {
        int t = rng.next_ternary();
        x = t == -1 ? q - 1 : static_cast<uint64_t>(t);
    }
    return out;
}

std::vector<uint64_t> sample_error(Rng& rng, size_t n, double stddev, uint64_t q) {
    std::vector<uint64_t> out(n);
    const double bound = 6.0 * stddev;
    for (auto& x : out) {
        double g = rng.next_gaussian() * stddev;
        g = std::clamp(g, -bound, bound);
        x = mod_from_signed(static_cast<int64_t>(std::llround(g)), q);
    }
    return out;
}

}  // namespace

std::string to_string(SlotModel m) {
    return m == SlotModel::paper_N ? "paper_N" : "standard_N_half";
}

std::string to_string(SecurityClaim c) {
    return c == SecurityClaim::paper_128bit ? "paper_128bit" : "desk_insecure";
}

double CkksParams::scale() const { return std::ldexp(1.0, scale_log2); }

uint64_t CkksParams::ciphertext_bytes() const {
    return 2 * static_cast<uint64_t>(ring_dimension) * static_cast<uint64_t>(q_bits) / 8;
}

SecurityClaim CkksParams::security_claim() const {
    return (ring_dimension == 8192 && q_bits == 240) ? SecurityClaim::paper_128bit
                                                     : SecurityClaim::desk_insecure;
}

void CkksParams::validate() const {
    if (ring_dimension < 8 || (ring_dimension & (ring_dimension - 1)) != 0)
        throw ConfigError("ring_dimension must be a power of two >= 8");
    if (q_bits < 21 || q_bits > 4096) throw ConfigError("q_bits out of range");
    if (scale_log2 < 1) throw ConfigError("scale_log2 must be positive");
    if (q_bits <= scale_log2 + 20)
        throw ConfigError("q_bits must exceed scale_log2 by at least 20 bits of headroom");
    if (noise_stddev <= 0.0) throw ConfigError("noise_stddev must be positive");
}

int usable_slot_bits(const CkksParams& params) {
    int ring_budget = params.q_bits - params.scale_log2 - 1;
    int fft_budget = 50 - log2_of_pow2(params.ring_dimension);
    return std::min(ring_budget, fft_budget);
}

void PackingConfig::validate(const CkksParams& params, int n_clients) const {
    if (lanes_per_slot < 1) throw ConfigError("lanes_per_slot must be >= 1");
    if (lane_bits < 2 || lane_bits > 32) throw ConfigError("lane_bits must be in [2, 32]");
    if (guard_bits < 0 || guard_bits > 32) throw ConfigError("guard_bits must be in [0, 32]");
    if (clip_range <= 0.0) throw ConfigError("clip_range must be positive");
    if (n_clients < 1) throw ConfigError("n_clients must be >= 1");
    int needed_guard = 0;
    while ((1 << needed_guard) < n_clients) ++needed_guard;
    if (guard_bits < needed_guard)
        throw ConfigError("guard_bits=" + std::to_string(guard_bits) +
                          " cannot absorb sums over " + std::to_string(n_clients) +
                          " clients (need >= " + std::to_string(needed_guard) + ")");
    int total = lanes_per_slot * bits_per_lane();
    int budget = usable_slot_bits(params);
    if (total > budget)
        throw ConfigError("packing needs " + std::to_string(total) +
                          " bits per slot but the parameter set only carries " +
                          std::to_string(budget) + " exactly-recoverable bits");
}

uint64_t Ciphertext::payload_bytes() const {
    return 2 * static_cast<uint64_t>(ring_dimension) * static_cast<uint64_t>(q_bits) / 8;
}

CkksContext::CkksContext(const CkksParams& params) : params_(params) {
    params_.validate();
    if (params_.crypto_supported()) {
        q_ = find_ntt_prime(params_.q_bits, params_.ring_dimension);
        ntt_ = std::make_unique<NegacyclicNtt>(params_.ring_dimension, q_);
    }
}

uint64_t CkksContext::modulus() const {
    require_crypto();
    return q_;
}

void CkksContext::require_crypto() const {
    if (!crypto_available())
        throw ConfigError("parameter set (q_bits=" + std::to_string(params_.q_bits) +
                          ") is accounting-only; crypto needs a single word-sized prime");
}

std::vector<uint64_t> CkksContext::ring_mul(const std::vector<uint64_t>& a,
                                            const std::vector<uint64_t>& b) const {
    return ntt_->multiply(a, b);
}

KeyPair CkksContext::keygen(uint64_t seed) const {
    require_crypto();
    const size_t n = params_.ring_dimension;

    Rng secret_rng(derive_seed(seed, kTagSecret));
    Rng uniform_rng(derive_seed(seed, kTagPkUniform));
    Rng error_rng(derive_seed(seed, kTagPkError));

    KeyPair kp;
    kp.secret_key.coeffs.resize(n);
    std::vector<uint64_t> s_ring(n);
    for (size_t i = 0; i < n; ++i) {
        int t = secret_rng.next_ternary();
        kp.secret_key.coeffs[i] = static_cast<int8_t>(t);
        s_ring[i] = t == -1 ? q_ - 1 : static_cast<uint64_t>(t);
    }

    kp.public_key.a.resize(n);
    for (auto& x : kp.public_key.a) x = uniform_rng.next_below(q_);

    std::vector<uint64_t> e = sample_error(error_rng, n, params_.noise_stddev, q_);
    std::vector<uint64_t> as = ring_mul(kp.public_key.a, s_ring);
    kp.public_key.b.resize(n);
    for (size_t i = 0; i < n; ++i) kp.public_key.b[i] = sub_mod(e[i], as[i], q_);
    return kp;
}

Plaintext CkksContext::encode(const std::vector<double>& values) const {
    require_crypto();
    const size_t n = params_.ring_dimension;
    const size_t slots = params_.slot_count();
    if (values.size() > slots)
        throw ContractViolation("encode: " + std::to_string(values.size()) +
                                " values exceed slot count " + std::to_string(slots));
    const double headroom = std::ldexp(1.0, params_.q_bits - params_.scale_log2 - 1);
    for (double v : values) {
        if (!std::isfinite(v) || std::fabs(v) > headroom)
            throw EncodingOverflowError("encode: |" + std::to_string(v) +
                                        "| exceeds encoding headroom " + std::to_string(headroom));
    }

    // Conjugate-symmetric embedding: slot i sits at the primitive root
    // zeta^(2i+1), its conjugate at index n-1-i.
    std::vector<std::complex<double>> z(n, 0.0);
    for (size_t i = 0; i < values.size(); ++i) {
        z[i] = values[i];
        z[n - 1 - i] = values[i];
    }
    fft_inplace(z, -1.0);

    const double delta = params_.scale();
    const double inv_n = 1.0 / static_cast<double>(n);
    Plaintext pt;
    pt.scale = delta;
    pt.coeffs.resize(n);
    for (size_t k = 0; k < n; ++k) {
        // p_k = Re(zeta^-k * fft_k) / n, then fixed-point at Delta.
        double ang = -M_PI * static_cast<double>(k) / static_cast<double>(n);
        std::complex<double> rot = std::polar(1.0, ang);
        double coeff = (z[k] * rot).real() * inv_n;
        pt.coeffs[k] = mod_from_signed(std::llround(coeff * delta), q_);
    }
    return pt;
}

std::vector<double> CkksContext::decode(const Plaintext& pt) const {
    require_crypto();
    const size_t n = params_.ring_dimension;
    if (pt.coeffs.size() != n) throw ContractViolation("decode: coefficient count mismatch");
    const double delta = pt.scale > 0.0 ? pt.scale : params_.scale();

    std::vector<std::complex<double>> u(n);
    const uint64_t half = q_ / 2;
    for (size_t k = 0; k < n; ++k) {
        uint64_t c = pt.coeffs[k];
        double centered = c > half ? -static_cast<double>(q_ - c) : static_cast<double>(c);
        double ang = M_PI * static_cast<double>(k) / static_cast<double>(n);
        u[k] = std::polar(centered / delta, ang);
    }
    fft_inplace(u, +1.0);

    std::vector<double> out(params_.slot_count());
    for (size_t i = 0; i < out.size(); ++i) out[i] = u[i].real();
    return out;
}

Ciphertext CkksContext::encrypt(const Plaintext& pt, const PublicKey& pk, uint64_t seed) const {
    require_crypto();
    const size_t n = params_.ring_dimension;
    if (pt.coeffs.size() != n || pk.a.size() != n || pk.b.size() != n)
        throw ContractViolation("encrypt: ring element size mismatch");

    Rng u_rng(derive_seed(seed, kTagEncU));
    Rng e0_rng(derive_seed(seed, kTagEncE0));
    Rng e1_rng(derive_seed(seed, kTagEncE1));

    std::vector<uint64_t> u = sample_ternary(u_rng, n, q_);
    std::vector<uint64_t> e0 = sample_error(e0_rng, n, params_.noise_stddev, q_);
    std::vector<uint64_t> e1 = sample_error(e1_rng, n, params_.noise_stddev, q_);

    std::vector<uint64_t> bu = ring_mul(pk.b, u);
    std::vector<uint64_t> au = ring_mul(pk.a, u);

    Ciphertext ct;
    ct.c0.resize(n);
    ct.c1.resize(n);
    for (size_t i = 0; i < n; ++i) {
        ct.c0[i] = add_mod(add_mod(bu[i], e0[i], q_), pt.coeffs[i], q_);
        ct.c1[i] = add_mod(au[i], e1[i], q_);
    }
    ct.scale = pt.scale;
    ct.level = 0;
    ct.slot_count = params_.slot_count();
    ct.ring_dimension = n;
    ct.q_bits = params_.q_bits;
    return ct;
}

std::vector<double> CkksContext::decrypt(const Ciphertext& ct, const SecretKey& sk) const {
    require_crypto();
    const size_t n = params_.ring_dimension;
    if (ct.ring_dimension != n || ct.q_bits != params_.q_bits)
        throw ContractViolation("decrypt: ciphertext does not match context parameters");

    std::vector<uint64_t> s_ring(n);
    for (size_t i = 0; i < n; ++i)
        s_ring[i] = sk.coeffs[i] == -1 ? q_ - 1 : static_cast<uint64_t>(sk.coeffs[i]);

    std::vector<uint64_t> c1s = ring_mul(ct.c1, s_ring);
    Plaintext pt;
    pt.scale = ct.scale;
    pt.coeffs.resize(n);
    for (size_t i = 0; i < n; ++i) pt.coeffs[i] = add_mod(ct.c0[i], c1s[i], q_);

    std::vector<double> slots = decode(pt);
    const double limit = 0.98 * std::ldexp(1.0, params_.q_bits - params_.scale_log2 - 1);
    for (double v : slots) {
        if (std::fabs(v) > limit)
            throw DecryptionOverflowError(
                "decrypted slot magnitude " + std::to_string(std::fabs(v)) +
                " sits at the ring wrap boundary; accumulated noise or sums exceeded headroom");
    }
    return slots;
}

Ciphertext CkksContext::add(const Ciphertext& a, const Ciphertext& b) const {
    require_crypto();
    if (a.ring_dimension != b.ring_dimension || a.q_bits != b.q_bits)
        throw ScaleMismatchError("homomorphic add: ring parameters differ");
    if (a.level != b.level)
        throw ScaleMismatchError("homomorphic add: levels differ (" + std::to_string(a.level) +
                                 " vs " + std::to_string(b.level) + ")");
    if (a.scale != b.scale)
        throw ScaleMismatchError("homomorphic add: scales differ (" + std::to_string(a.scale) +
                                 " vs " + std::to_string(b.scale) + ")");
    if (a.ring_dimension != params_.ring_dimension)
        throw ScaleMismatchError("homomorphic add: ciphertexts do not match context");

    Ciphertext out = a;
    for (size_t i = 0; i < out.c0.size(); ++i) {
        out.c0[i] = add_mod(a.c0[i], b.c0[i], q_);
        out.c1[i] = add_mod(a.c1[i], b.c1[i], q_);
    }
    return out;
}

Ciphertext CkksContext::encrypt_values(const std::vector<double>& values, const PublicKey& pk,
                                       uint64_t seed) const {
    return encrypt(encode(values), pk, seed);
}

// ---- Lane packing ----

uint64_t quantize_lane(double value, const PackingConfig& pc) {
    // Zero sits exactly on the offset code 2^(lane_bits-1), so all-zero
    // vectors survive quantize/sum/de-quantize bit-exactly.
    double clipped = std::clamp(value, -pc.clip_range, pc.clip_range);
    int64_t half = int64_t{1} << (pc.lane_bits - 1);
    int64_t code = std::llround(clipped / pc.quant_step()) + half;
    code = std::clamp<int64_t>(code, 0, static_cast<int64_t>(pc.max_code()));
    return static_cast<uint64_t>(code);
}

std::vector<double> pack_lanes(const std::vector<double>& values, const PackingConfig& pc,
                               const CkksParams& params, int n_clients) {
    pc.validate(params, n_clients);
    const size_t lanes = static_cast<size_t>(pc.lanes_per_slot);
    const size_t n_slots = (values.size() + lanes - 1) / lanes;
    std::vector<double> packed(n_slots, 0.0);
    for (size_t i = 0; i < values.size(); ++i) {
        size_t slot = i / lanes;
        size_t lane = i % lanes;
        // First value in the slot occupies the most-significant lane.
        int shift = pc.bits_per_lane() * static_cast<int>(lanes - 1 - lane);
        packed[slot] += static_cast<double>(quantize_lane(values[i], pc)) * std::ldexp(1.0, shift);
    }
    return packed;
}

std::vector<double> unpack_lane_sums(const std::vector<double>& packed_sums, size_t original_len,
                                     const PackingConfig& pc, int n_summands) {
    const size_t lanes = static_cast<size_t>(pc.lanes_per_slot);
    const size_t n_slots = (original_len + lanes - 1) / lanes;
    if (packed_sums.size() < n_slots)
        throw ContractViolation("unpack_lane_sums: not enough packed slots");
    const uint64_t lane_mask = (uint64_t{1} << pc.bits_per_lane()) - 1;
    const double step = pc.quant_step();
    const int64_t half = int64_t{1} << (pc.lane_bits - 1);

    std::vector<double> sums(original_len, 0.0);
    for (size_t slot = 0; slot < n_slots; ++slot) {
        int64_t raw = std::llround(packed_sums[slot]);
        uint64_t word = raw < 0 ? 0 : static_cast<uint64_t>(raw);
        for (size_t lane = 0; lane < lanes; ++lane) {
            size_t idx = slot * lanes + lane;
            if (idx >= original_len) break;
            int shift = pc.bits_per_lane() * static_cast<int>(lanes - 1 - lane);
            auto code_sum = static_cast<int64_t>((word >> shift) & lane_mask);
            sums[idx] = static_cast<double>(code_sum - n_summands * half) * step;
        }
    }
    return sums;
}

uint64_t effective_slots_per_ciphertext(const CkksParams& params, SlotModel slot_model) {
    return slot_model == SlotModel::paper_N ? params.ring_dimension : params.ring_dimension / 2;
}

uint64_t ciphertext_count(uint64_t k, const CkksParams& params, const PackingConfig& pc,
                          SlotModel slot_model) {
    if (k == 0) return 0;
    uint64_t per_ct = effective_slots_per_ciphertext(params, slot_model) *
                      static_cast<uint64_t>(pc.lanes_per_slot);
    return (k + per_ct - 1) / per_ct;
}

// ---- Serialization ----

namespace {

class BitWriter {
public:
    explicit BitWriter(std::vector<uint8_t>& out) : out_(out) {}
    void write(uint64_t value, int bits) {
        for (int i = 0; i < bits; ++i) {
            if (bit_ == 0) out_.push_back(0);
            if ((value >> i) & 1) out_.back() |= static_cast<uint8_t>(1u << bit_);
            bit_ = (bit_ + 1) % 8;
        }
    }

private:
    std::vector<uint8_t>& out_;
    int bit_ = 0;
};

class BitReader {
public:
    BitReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
    uint64_t read(int bits) {
        uint64_t v = 0;
        for (int i = 0; i < bits; ++i) {
            size_t byte = pos_ / 8;
            if (byte >= size_) throw ConfigError("ciphertext payload truncated");
            if ((data_[byte] >> (pos_ % 8)) & 1) v |= uint64_t{1} << i;
            ++pos_;
        }
        return v;
    }

private:
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<uint8_t> serialize_ciphertext(const Ciphertext& ct, SlotModel slot_model) {
    std::vector<uint8_t> out;
    out.reserve(32 + ct.payload_bytes());
    for (char c : kMagic) out.push_back(static_cast<uint8_t>(c));
    out.push_back(static_cast<uint8_t>(kSerialVersion & 0xFF));
    out.push_back(static_cast<uint8_t>(kSerialVersion >> 8));
    out.push_back(slot_model == SlotModel::paper_N ? 0 : 1);
    out.push_back(0);  // reserved
    put_u32(out, static_cast<uint32_t>(ct.ring_dimension));
    put_u32(out, static_cast<uint32_t>(ct.q_bits));
    put_u32(out, static_cast<uint32_t>(static_cast<int32_t>(std::llround(std::log2(ct.scale)))));
    put_u32(out, static_cast<uint32_t>(ct.level));
    put_u32(out, static_cast<uint32_t>(ct.slot_count));

    BitWriter w(out);
    for (uint64_t c : ct.c0) w.write(c, ct.q_bits);
    for (uint64_t c : ct.c1) w.write(c, ct.q_bits);
    return out;
}

Ciphertext deserialize_ciphertext(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 32 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw ConfigError("not a serialized ciphertext (bad magic)");
    uint16_t version = static_cast<uint16_t>(bytes[8]) | (static_cast<uint16_t>(bytes[9]) << 8);
    if (version != kSerialVersion)
        throw ConfigError("unsupported ciphertext version " + std::to_string(version));

    Ciphertext ct;
    ct.ring_dimension = get_u32(bytes.data() + 12);
    ct.q_bits = static_cast<int>(get_u32(bytes.data() + 16));
    ct.scale = std::ldexp(1.0, static_cast<int32_t>(get_u32(bytes.data() + 20)));
    ct.level = static_cast<int32_t>(get_u32(bytes.data() + 24));
    ct.slot_count = get_u32(bytes.data() + 28);

    if (bytes.size() != 32 + ct.payload_bytes())
        throw ConfigError("ciphertext payload size mismatch");

    BitReader r(bytes.data() + 32, bytes.size() - 32);
    ct.c0.resize(ct.ring_dimension);
    ct.c1.resize(ct.ring_dimension);
    for (auto& c : ct.c0) c = r.read(ct.q_bits);
    for (auto& c : ct.c1) c = r.read(ct.q_bits);
    return ct;
}

std::vector<uint8_t> encode_index_deltas(const std::vector<uint32_t>& sorted_indices) {
    std::vector<uint8_t> out;
    uint32_t prev = 0;
    bool first = true;
    for (uint32_t idx : sorted_indices) {
        if (!first && idx <= prev)
            throw ContractViolation("index deltas need strictly ascending indices");
        uint32_t delta = first ? idx : idx - prev;
        prev = idx;
        first = false;
        while (delta >= 0x80) {
            out.push_back(static_cast<uint8_t>(delta) | 0x80);
            delta >>= 7;
        }
        out.push_back(static_cast<uint8_t>(delta));
    }
    return out;
}

std::vector<uint32_t> decode_index_deltas(const std::vector<uint8_t>& bytes) {
    std::vector<uint32_t> out;
    uint32_t prev = 0;
    size_t pos = 0;
    bool first = true;
    while (pos < bytes.size()) {
        uint32_t delta = 0;
        int shift = 0;
        for (;;) {
            if (pos >= bytes.size()) throw ConfigError("truncated varint index stream");
            uint8_t byte = bytes[pos++];
            delta |= static_cast<uint32_t>(byte & 0x7F) << shift;
            if ((byte & 0x80) == 0) break;
            shift += 7;
        }
        prev = first ? delta : prev + delta;
        first = false;
        out.push_back(prev);
    }
    return out;
}

}  // namespace medhe
