#include "medhe/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "medhe/errors.hpp"
#include "medhe/rng.hpp"

namespace medhe {

namespace {

constexpr uint64_t kTagData = 0x64617461ULL;
constexpr uint64_t kTagSplit = 0x73706c74ULL;
constexpr uint64_t kTagPartition = 0x70617274ULL;
constexpr uint64_t kTagInit = 0x696e6974ULL;
constexpr uint64_t kTagTrain = 0x7472ULL;
constexpr uint64_t kTagNoise = 0x6e6fULL;
constexpr uint64_t kTagEncrypt = 0x656eULL;
constexpr uint64_t kTagDropout = 0x64726f70ULL;
constexpr uint64_t kTagKeys = 0x6b657973ULL;

uint64_t round_client_tag(int round, int client) {
    return static_cast<uint64_t>(round) * 1000003ULL + static_cast<uint64_t>(client);
}

SparseGradient dense_as_sparse(const GradientVector& g) {
    SparseGradient sg;
    sg.values = g;
    sg.dense_dim = g.size();
    sg.refresh_nnz();
    return sg;
}

std::vector<uint32_t> nonzero_indices(const SparseGradient& g) {
    std::vector<uint32_t> idx;
    idx.reserve(g.nnz);
    for (size_t i = 0; i < g.values.size(); ++i)
        if (g.values[i] != 0.0) idx.push_back(static_cast<uint32_t>(i));
    return idx;
}

struct CohortUpdate {
    int client = 0;
    int origin_round = 0;  // encryption randomness is keyed on (origin, client)
    SparseGradient update;
};

// Aggregates the cohort through the packed-and-encrypted path. The lane
// layout is identical across clients (dense post-sparsification vectors),
// so slotwise ciphertext sums realize lane-wise integer sums. Encryption
// randomness is keyed on each update's origin round so a late delivery never
// reuses the stream of a fresh one.
GradientVector aggregate_encrypted(const std::vector<CohortUpdate>& cohort, const FlConfig& cfg,
                                   int round_index) {
    const size_t d = cohort.front().update.values.size();
    const int n = static_cast<int>(cohort.size());

    PackingConfig pc = cfg.packing;
    if (!cfg.ablation.packing) pc.lanes_per_slot = 1;

    // Cleartext scale metadata: the cohort-wide magnitude bound for the round.
    double round_max = 0.0;
    for (const auto& cu : cohort)
        for (double v : cu.update.values) round_max = std::max(round_max, std::fabs(v));
    pc.clip_range = round_max > 0.0 ? round_max : 1.0;

    CkksContext ctx(cfg.he);
    KeyPair keys = ctx.keygen(derive_seed(cfg.seed, kTagKeys));

    const size_t slots = cfg.he.slot_count();
    const size_t packed_len = (d + pc.lanes_per_slot - 1) / pc.lanes_per_slot;
    const size_t n_chunks = (packed_len + slots - 1) / slots;

    std::vector<Ciphertext> sums;
    sums.reserve(n_chunks);
    for (size_t chunk = 0; chunk < n_chunks; ++chunk) {
        bool first = true;
        for (const auto& cu : cohort) {
            std::vector<double> packed = pack_lanes(cu.update.values, pc, cfg.he, cfg.n_clients);
            size_t begin = chunk * slots;
            size_t end = std::min(packed_len, begin + slots);
            std::vector<double> window(packed.begin() + static_cast<ptrdiff_t>(begin),
                                       packed.begin() + static_cast<ptrdiff_t>(end));
            Ciphertext ct = ctx.encrypt_values(
                window, keys.public_key,
                derive_seed(client_encrypt_seed(cfg, cu.origin_round, cu.client), chunk));
            if (round_index == cfg.inject_scale_fault_round && first && chunk == 0)
                ct.scale *= 2.0;  // fault injection hook
            if (first) {
                sums.push_back(std::move(ct));
                first = false;
            } else {
                sums[chunk] = ctx.add(sums[chunk], ct);
            }
        }
    }

    std::vector<double> packed_sums;
    packed_sums.reserve(packed_len);
    for (size_t chunk = 0; chunk < n_chunks; ++chunk) {
        std::vector<double> slots_out = ctx.decrypt(sums[chunk], keys.secret_key);
        size_t take = std::min(slots, packed_len - chunk * slots);
        packed_sums.insert(packed_sums.end(), slots_out.begin(),
                           slots_out.begin() + static_cast<ptrdiff_t>(take));
    }

    std::vector<double> value_sums = unpack_lane_sums(packed_sums, d, pc, n);
    GradientVector mean(d);
    for (size_t i = 0; i < d; ++i) mean[i] = value_sums[i] / static_cast<double>(n);
    return mean;
}

GradientVector aggregate_plain(const std::vector<CohortUpdate>& cohort) {
    const size_t d = cohort.front().update.values.size();
    GradientVector mean(d, 0.0);
    for (const auto& cu : cohort)
        for (size_t i = 0; i < d; ++i) mean[i] += cu.update.values[i];
    for (auto& v : mean) v /= static_cast<double>(cohort.size());
    return mean;
}

}  // namespace

ModelArch FlConfig::arch() const {
    ModelArch a;
    a.kind = model_kind;
    a.n_features = data.n_features;
    a.hidden = model_kind == ModelKind::mlp ? hidden : 0;
    return a;
}

void FlConfig::validate() const {
    if (n_clients < 1) throw ConfigError("n_clients must be >= 1");
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (min_quorum < 1 || min_quorum > n_clients)
        throw ConfigError("min_quorum must lie in [1, n_clients]");
    if (lr < 0.0) throw ConfigError("lr must be non-negative");
    if (local_epochs < 1) throw ConfigError("local_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (dropout_prob < 0.0 || dropout_prob > 1.0)
        throw ConfigError("dropout_prob must lie in [0, 1]");
    if (straggler_prob < 0.0 || straggler_prob > 1.0)
        throw ConfigError("straggler_prob must lie in [0, 1]");
    if (staleness_limit < 0) throw ConfigError("staleness_limit must be >= 0");
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ConfigError("test_fraction must lie in (0, 1)");
    sparsifier.validate();
    dp.validate();
    he.validate();
    if (ablation.encryption) {
        // Lane budget and guard headroom must hold before any round runs.
        PackingConfig pc = packing;
        if (!ablation.packing) pc.lanes_per_slot = 1;
        pc.validate(he, n_clients);
        if (!he.crypto_supported())
            throw ConfigError("encryption enabled but the parameter set is accounting-only");
    }
}

uint64_t client_train_seed(const FlConfig& cfg, int round, int client) {
    return derive_seed(cfg.seed, kTagTrain, round_client_tag(round, client));
}

uint64_t client_noise_seed(const FlConfig& cfg, int round, int client) {
    return derive_seed(cfg.seed, kTagNoise, round_client_tag(round, client));
}

uint64_t client_encrypt_seed(const FlConfig& cfg, int round, int client) {
    return derive_seed(cfg.seed, kTagEncrypt, round_client_tag(round, client));
}

std::vector<int> simulate_dropout(const FlConfig& cfg, int round) {
    Rng rng(derive_seed(cfg.seed, kTagDropout, static_cast<uint64_t>(round)));
    std::vector<int> participants;
    for (int c = 0; c < cfg.n_clients; ++c) {
        if (rng.next_double() >= cfg.dropout_prob) participants.push_back(c);
    }
    return participants;
}

FlState make_initial_state(const FlConfig& cfg) {
    cfg.validate();
    Dataset full = make_synthetic(cfg.data, derive_seed(cfg.seed, kTagData));
    TrainTestSplit split =
        split_dataset(full, cfg.test_fraction, derive_seed(cfg.seed, kTagSplit));
    std::vector<Dataset> shards = partition_dirichlet(
        split.train, cfg.n_clients, cfg.dirichlet_alpha, derive_seed(cfg.seed, kTagPartition));

    FlState state;
    state.global = Model::random_init(cfg.arch(), derive_seed(cfg.seed, kTagInit), 0.01);
    state.test_set = std::move(split.test);
    const size_t d = cfg.arch().dim();
    state.clients.reserve(shards.size());
    for (auto& shard : shards)
        state.clients.push_back({std::move(shard), SparsifierState::initial(d)});
    return state;
}

std::pair<FlState, RoundReport> run_round(FlState state, const FlConfig& cfg, int round_index) {
    const size_t d = cfg.arch().dim();
    const auto real_start = std::chrono::steady_clock::now();
    RoundReport report;
    report.round = round_index;

    // Snapshot the mutable per-client state so skipped or aborted rounds can
    // roll back to exactly the pre-round state.
    std::vector<SparsifierState> sparsifier_snapshot;
    sparsifier_snapshot.reserve(state.clients.size());
    for (const auto& c : state.clients) sparsifier_snapshot.push_back(c.sparsifier);
    std::vector<PendingUpdate> pending_snapshot = state.pending;

    std::vector<int> responders = simulate_dropout(cfg, round_index);

    // Stragglers among the responders miss the round barrier; their updates
    // are queued and delivered later, tagged with the origin round.
    Rng straggle_rng(derive_seed(cfg.seed, 0x73747261ULL, static_cast<uint64_t>(round_index)));
    std::vector<int> on_time;
    std::vector<int> late;
    for (int c : responders) {
        bool slow = straggle_rng.next_double() < cfg.straggler_prob;
        double base = cfg.costs.train_per_sample * static_cast<double>(cfg.local_epochs) *
                      static_cast<double>(state.clients[c].data.size());
        double response = slow ? base * cfg.costs.straggler_factor : base;
        if (response > cfg.client_timeout) {
            late.push_back(c);
        } else {
            on_time.push_back(c);
            report.wall_time = std::max(report.wall_time, response);
        }
    }

    std::vector<CohortUpdate> cohort;
    TrainConfig tc{cfg.lr, cfg.local_epochs, cfg.batch_size, cfg.weight_decay};
    SparsifierConfig sc = cfg.sparsifier;
    sc.error_feedback = cfg.ablation.error_feedback;
    sc.adaptive_threshold = cfg.ablation.adaptive_threshold;

    auto build_update = [&](int c) -> SparseGradient {
        Model trained = local_train(state.global, state.clients[c].data, tc,
                                    client_train_seed(cfg, round_index, c));
        GradientVector update = compute_update(state.global, trained);
        SparseGradient sg;
        if (cfg.ablation.sparsification) {
            SparsifyResult res = sparsify(update, sc, state.clients[c].sparsifier);
            state.clients[c].sparsifier = std::move(res.state);
            sg = std::move(res.sparse);
        } else {
            sg = dense_as_sparse(update);
        }
        if (cfg.dp.sigma > 0.0) {
            sg = clip_gradient(sg, cfg.dp.sensitivity);
            sg = add_gaussian_noise(sg, cfg.dp.sigma, client_noise_seed(cfg, round_index, c));
        }
        return sg;
    };

    for (int c : on_time) cohort.push_back({c, round_index, build_update(c)});
    for (int c : late) {
        PendingUpdate pu;
        pu.client = c;
        pu.origin_round = round_index;
        pu.ready_round = round_index + std::max(1, cfg.straggler_delay_rounds);
        pu.update = build_update(c);
        state.pending.push_back(std::move(pu));
    }

    // Deliver queued updates that are ready and still fresh enough.
    std::vector<PendingUpdate> still_pending;
    for (auto& pu : state.pending) {
        if (pu.ready_round > round_index) {
            still_pending.push_back(std::move(pu));
        } else if (round_index - pu.origin_round <= cfg.staleness_limit) {
            cohort.push_back({pu.client, pu.origin_round, std::move(pu.update)});
            report.stale_deliveries += 1;
        }
        // Older arrivals are discarded.
    }
    state.pending = std::move(still_pending);

    // Contributions always combine in client-index order, independent of
    // scheduling.
    std::stable_sort(cohort.begin(), cohort.end(),
                     [](const CohortUpdate& a, const CohortUpdate& b) { return a.client < b.client; });
    for (const auto& cu : cohort) report.participating_clients.push_back(cu.client);

    DpConfig ledger = cfg.dp;
    ledger.sparsity = cfg.ablation.sparsification ? cfg.sparsifier.sparsity : 0.0;

    auto abort_round = [&](bool quorum, bool he_ok) {
        // Nothing leaves the clients in a skipped round: restore sparsifier
        // states and the delivery queue.
        for (size_t i = 0; i < state.clients.size(); ++i)
            state.clients[i].sparsifier = std::move(sparsifier_snapshot[i]);
        state.pending = std::move(pending_snapshot);
        report.stale_deliveries = 0;

        report.quorum_failed = quorum;
        report.he_decryption_ok = he_ok;
        EvalMetrics m = evaluate(state.global, state.test_set);
        report.global_accuracy = m.accuracy;
        report.f1 = m.f1;
        report.loss = m.loss;
        if (state.completed_rounds == 0) {
            report.epsilon_cumulative = 0.0;
        } else {
            ledger.rounds = static_cast<uint64_t>(state.completed_rounds);
            report.epsilon_cumulative = epsilon_for(ledger).epsilon;
        }
    };

    if (static_cast<int>(cohort.size()) < cfg.min_quorum) {
        abort_round(true, true);
        return {std::move(state), report};
    }

    GradientVector mean;
    if (cfg.ablation.encryption) {
        try {
            mean = aggregate_encrypted(cohort, cfg, round_index);
        } catch (const ScaleMismatchError&) {
            // Mismatched scales abort the round; nothing is applied.
            abort_round(false, false);
            return {std::move(state), report};
        }
    } else {
        mean = aggregate_plain(cohort);
    }

    for (size_t i = 0; i < d; ++i) state.global.weights[i] += mean[i];
    state.completed_rounds += 1;

    EvalMetrics m = evaluate(state.global, state.test_set);
    report.global_accuracy = m.accuracy;
    report.f1 = m.f1;
    report.loss = m.loss;

    // Communication ledger: ciphertext bytes from the closed-form accounting;
    // the index side channel is measured from the actual retained positions
    // and reported separately.
    const double acct_sparsity = cfg.ablation.sparsification ? cfg.sparsifier.sparsity : 0.0;
    if (cfg.ablation.encryption) {
        PackingConfig pc = cfg.packing;
        if (!cfg.ablation.packing) pc.lanes_per_slot = 1;
        CommBreakdown br = communication_breakdown(
            d, acct_sparsity, static_cast<int>(cohort.size()), cfg.he, pc, cfg.slot_model);
        report.bytes_up_per_client = br.encrypted_bytes_per_client;
    } else if (cfg.ablation.sparsification) {
        report.bytes_up_per_client = retained_count(d, acct_sparsity) * 4;
    } else {
        report.bytes_up_per_client = d * 4;
    }
    report.bytes_up_total = report.bytes_up_per_client * cohort.size();
    report.bytes_down_total = static_cast<uint64_t>(cohort.size()) * d * 4;
    if (cfg.ablation.sparsification) {
        for (const auto& cu : cohort)
            report.index_bytes_total += encode_index_deltas(nonzero_indices(cu.update)).size();
    }

    ledger.rounds = static_cast<uint64_t>(state.completed_rounds);
    report.epsilon_cumulative = epsilon_for(ledger).epsilon;

    report.wall_time += cfg.costs.sparsify_per_coord * static_cast<double>(d);
    if (cfg.ablation.encryption) {
        PackingConfig pc = cfg.packing;
        if (!cfg.ablation.packing) pc.lanes_per_slot = 1;
        uint64_t cts = ciphertext_count(std::max<uint64_t>(1, retained_count(d, acct_sparsity)),
                                        cfg.he, pc, cfg.slot_model);
        report.wall_time += cfg.costs.encrypt_per_ciphertext * static_cast<double>(cts) +
                            cfg.costs.aggregate_per_ciphertext * static_cast<double>(cts) *
                                static_cast<double>(cohort.size());
    }
    if (cfg.measure_wall_time) {
        report.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - real_start).count();
    }

    return {std::move(state), report};
}

ExperimentResult run_experiment(const FlConfig& cfg) {
    cfg.validate();
    FlState state = make_initial_state(cfg);

    ExperimentResult result;
    result.rounds.reserve(static_cast<size_t>(cfg.rounds));
    for (int r = 1; r <= cfg.rounds; ++r) {
        auto [next, report] = run_round(std::move(state), cfg, r);
        state = std::move(next);
        result.rounds.push_back(std::move(report));
    }
    result.final_model = std::move(state.global);
    return result;
}

}  // namespace medhe
