#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "medhe/accounting.hpp"
#include "medhe/dp.hpp"
#include "medhe/he.hpp"
#include "medhe/model.hpp"
#include "medhe/sparsifier.hpp"

namespace medhe {

struct AblationFlags {
    bool error_feedback = true;
    bool adaptive_threshold = true;
    bool packing = true;
    bool encryption = true;
    bool sparsification = true;
};

/// Simulated per-operation costs (seconds); wall times in reports are event
/// counts times these constants, so runs are machine-independent.
struct CostModel {
    double train_per_sample = 1e-4;
    double sparsify_per_coord = 1e-8;
    double encrypt_per_ciphertext = 5e-3;
    double aggregate_per_ciphertext = 1e-3;
    double straggler_factor = 40.0;
};

struct FlConfig {
    int n_clients = 5;
    int rounds = 3;
    double lr = 0.1;
    int local_epochs = 1;
    size_t batch_size = 16;
    double weight_decay = 0.0;

    int min_quorum = 1;
    double dropout_prob = 0.0;
    double straggler_prob = 0.0;
    int straggler_delay_rounds = 1;
    int staleness_limit = 2;        ///< stale arrivals older than this many rounds are discarded
    double client_timeout = 300.0;  ///< simulated seconds the server waits per round

    SparsifierConfig sparsifier;
    DpConfig dp;  ///< dp.sigma = 0 disables the Gaussian mechanism entirely
    CkksParams he;
    PackingConfig packing;
    SlotModel slot_model = SlotModel::paper_N;
    AblationFlags ablation;
    CostModel costs;

    // Data and model for the desk-scale task.
    SyntheticSpec data;
    double dirichlet_alpha = 0.1;
    double test_fraction = 0.25;
    ModelKind model_kind = ModelKind::logistic;
    size_t hidden = 8;

    uint64_t seed = 42;

    /// Report measured wall time instead of the simulated cost model.
    /// Measured reports are machine-dependent; off by default.
    bool measure_wall_time = false;

    /// Test hook: corrupt one ciphertext scale in this round (-1 = never) to
    /// exercise the decryption-failure path.
    int inject_scale_fault_round = -1;

    ModelArch arch() const;
    void validate() const;
};

struct RoundReport {
    int round = 0;
    double global_accuracy = 0.0;
    double f1 = 0.0;
    double loss = 0.0;
    uint64_t bytes_up_per_client = 0;
    uint64_t bytes_up_total = 0;
    uint64_t bytes_down_total = 0;
    uint64_t index_bytes_total = 0;  ///< cleartext index side channel, never folded into bytes_up
    double epsilon_cumulative = 0.0;
    std::vector<int> participating_clients;
    int stale_deliveries = 0;  ///< queued straggler updates folded into this round
    double wall_time = 0.0;
    bool he_decryption_ok = true;
    bool quorum_failed = false;
};

struct PendingUpdate {
    int client = 0;
    int origin_round = 0;
    int ready_round = 0;
    SparseGradient update;  ///< already sparsified/clipped/noised at origin time
};

struct ClientState {
    Dataset data;
    SparsifierState sparsifier;
};

struct FlState {
    Model global;
    std::vector<ClientState> clients;
    Dataset test_set;
    std::vector<PendingUpdate> pending;
    int completed_rounds = 0;  ///< aggregated (non-skipped) rounds, drives the epsilon ledger
};

struct ExperimentResult {
    std::vector<RoundReport> rounds;
    Model final_model;
};

/// Deterministic per-(round, client) sub-seeds; exposed so side-by-side
/// oracles can replay the exact same local computations.
uint64_t client_train_seed(const FlConfig& cfg, int round, int client);
uint64_t client_noise_seed(const FlConfig& cfg, int round, int client);
uint64_t client_encrypt_seed(const FlConfig& cfg, int round, int client);

/// Independent Bernoulli dropout per client; deterministic per (cfg.seed, round).
std::vector<int> simulate_dropout(const FlConfig& cfg, int round);

/// Builds the initial federation: synthetic data, train/test split, Dirichlet
/// shards, zero sparsifier states, seeded global init.
FlState make_initial_state(const FlConfig& cfg);

/// One protocol round: broadcast, local train, sparsify, clip+noise,
/// pack+encrypt, aggregate, decrypt, update. Quorum failures and HE faults
/// leave the model untouched and are flagged in the report.
std::pair<FlState, RoundReport> run_round(FlState state, const FlConfig& cfg, int round_index);

ExperimentResult run_experiment(const FlConfig& cfg);

}  // namespace medhe
