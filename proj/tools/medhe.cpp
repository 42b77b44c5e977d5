// medhe: deterministic federated-learning simulator with adaptive top-k
// sparsification, additive CKKS-style aggregation, DP accounting, and a
// membership-inference harness.
//
// Subcommands: run, sweep, account, attack, converge, ttest, schema.
// Exit codes: 0 ok, 1 runtime failure, 2 configuration error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medhe/attacks.hpp"
#include "medhe/convergence.hpp"
#include "medhe/errors.hpp"
#include "medhe/manifest.hpp"
#include "medhe/reporting.hpp"
#include "medhe/stats.hpp"

using nlohmann::json;
using namespace medhe;

namespace {

struct CliOptions {
    std::string manifest_path;
    std::string out_override;
    int threads = 0;
    int64_t seed_override = -1;
};

int read_env_threads() {
    if (const char* v = std::getenv("MEDHE_THREADS")) {
        int n = std::atoi(v);
        if (n > 0) return n;
    }
    return 1;
}

std::string resolve_out_dir(const ExperimentManifest& m, const CliOptions& opts) {
    std::string root = m.output_dir;
    if (const char* v = std::getenv("MEDHE_OUT_ROOT")) root = v;
    if (!opts.out_override.empty()) root = opts.out_override;
    return root + "/" + to_string(m.kind) + "_" + m.hash_hex();
}

ExperimentManifest load_manifest(CliOptions& opts) {
    if (opts.manifest_path.empty()) throw ConfigError("--manifest is required");
    ExperimentManifest m = ExperimentManifest::from_file(opts.manifest_path);
    if (opts.seed_override >= 0) {
        m.seeds = {static_cast<uint64_t>(opts.seed_override)};
    }
    if (opts.threads <= 0) opts.threads = read_env_threads();
    return m;
}

// Runs fn(i) for i in [0, n) on up to n_threads workers; results land in
// index order, so output is independent of scheduling.
template <typename Fn>
void parallel_for(size_t n, int n_threads, Fn&& fn) {
    if (n_threads <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    int workers = std::min<int>(n_threads, static_cast<int>(n));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

struct TrialOutcome {
    uint64_t seed = 0;
    ExperimentResult result;
};

std::vector<TrialOutcome> run_trials(const FlConfig& base, const std::vector<uint64_t>& seeds,
                                     int threads) {
    std::vector<TrialOutcome> out(seeds.size());
    parallel_for(seeds.size(), threads, [&](size_t i) {
        FlConfig cfg = base;
        cfg.seed = seeds[i];
        out[i] = {seeds[i], run_experiment(cfg)};
    });
    return out;
}

json trial_to_json(const ExperimentManifest& m, const TrialOutcome& t) {
    json rounds = json::array();
    for (const auto& r : t.result.rounds) rounds.push_back(round_to_json(r));
    const RoundReport& last = t.result.rounds.back();
    return json{{"manifest_hash", m.hash_hex()},
                {"seed", t.seed},
                {"security_claim", to_string(m.fl.he.security_claim())},
                {"rounds", rounds},
                {"final", {{"accuracy", last.global_accuracy},
                           {"f1", last.f1},
                           {"loss", last.loss},
                           {"epsilon_cumulative", json_number(last.epsilon_cumulative)}}}};
}

std::string trial_csv(const ExperimentManifest& m, const TrialOutcome& t) {
    std::ostringstream ss;
    ss << "# manifest " << m.hash_hex() << " seed " << t.seed << "\n";
    ss << round_csv_header() << "\n";
    for (const auto& r : t.result.rounds) ss << round_csv_row(r) << "\n";
    return ss.str();
}

json trials_summary(const ExperimentManifest& m, const std::vector<TrialOutcome>& trials) {
    std::vector<double> accs, f1s, losses, bytes_up;
    json per_seed = json::array();
    for (const auto& t : trials) {
        const RoundReport& last = t.result.rounds.back();
        accs.push_back(last.global_accuracy);
        f1s.push_back(last.f1);
        losses.push_back(last.loss);
        bytes_up.push_back(static_cast<double>(last.bytes_up_per_client));
        per_seed.push_back(json{{"seed", t.seed},
                                {"final_accuracy", last.global_accuracy},
                                {"final_f1", last.f1},
                                {"final_loss", last.loss},
                                {"bytes_up_per_client", last.bytes_up_per_client},
                                {"epsilon_cumulative", json_number(last.epsilon_cumulative)}});
    }
    return json{{"manifest_hash", m.hash_hex()},
                {"kind", to_string(m.kind)},
                {"seeds", m.seeds},
                {"security_claim", to_string(m.fl.he.security_claim())},
                {"accuracy_mean", mean_of(accs)},
                {"accuracy_std", stddev_of(accs)},
                {"accuracy_median", median_of(accs)},
                {"f1_mean", mean_of(f1s)},
                {"f1_std", stddev_of(f1s)},
                {"loss_median", median_of(losses)},
                {"bytes_up_per_client_median", static_cast<uint64_t>(median_of(bytes_up))},
                {"mb_up_per_client", format_mb_2dp(static_cast<uint64_t>(median_of(bytes_up)))},
                {"trials", per_seed}};
}

std::string provenance_comment(const ExperimentManifest& m) {
    return "<!-- manifest " + m.hash_hex() + " -->\n";
}

void write_accuracy_svg(const ExperimentManifest& m, const std::string& path,
                        const std::vector<TrialOutcome>& trials) {
    if (trials.empty()) return;
    std::vector<double> xs;
    for (const auto& r : trials.front().result.rounds) xs.push_back(r.round);
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (const auto& t : trials) {
        std::vector<double> ys;
        for (const auto& r : t.result.rounds) ys.push_back(r.global_accuracy);
        series.emplace_back("seed " + std::to_string(t.seed), std::move(ys));
    }
    write_text_file(path, provenance_comment(m) +
                              svg_line_chart("global accuracy per round", "round", "accuracy",
                                             xs, series));
}

int cmd_fl_run(const ExperimentManifest& m, const CliOptions& opts) {
    std::string dir = resolve_out_dir(m, opts);
    std::cout << "security claim: " << to_string(m.fl.he.security_claim()) << "\n";

    std::vector<TrialOutcome> trials = run_trials(m.fl, m.seeds, opts.threads);
    for (const auto& t : trials) {
        write_text_file(dir + "/trial_" + std::to_string(t.seed) + ".csv", trial_csv(m, t));
        write_text_file(dir + "/trial_" + std::to_string(t.seed) + ".json",
                        trial_to_json(m, t).dump(2) + "\n");
    }
    write_text_file(dir + "/summary.json", trials_summary(m, trials).dump(2) + "\n");
    write_accuracy_svg(m, dir + "/accuracy.svg", trials);
    std::cout << "wrote " << trials.size() << " trials + summary to " << dir << "\n";

    bool all_failed = true;
    for (const auto& t : trials)
        for (const auto& r : t.result.rounds)
            if (!r.quorum_failed) all_failed = false;
    if (all_failed) {
        std::cerr << json{{"error", "quorum failed in every round of every trial"}}.dump() << "\n";
        return 1;
    }
    return 0;
}

int cmd_ablation(const ExperimentManifest& m, const CliOptions& opts) {
    std::string dir = resolve_out_dir(m, opts);
    std::cout << "security claim: " << to_string(m.fl.he.security_claim()) << "\n";

    struct NamedConfig {
        std::string name;
        AblationFlags flags;
    };
    const std::vector<NamedConfig> configs = {
        {"full", {true, true, true, true, true}},
        {"no_error_feedback", {false, true, true, true, true}},
        {"no_adaptive_threshold", {true, false, true, true, true}},
        {"no_packing", {true, true, false, true, true}},
        {"no_encryption", {true, true, true, false, true}},
        {"no_sparsification", {true, true, true, true, false}},
    };

    json rows = json::array();
    for (const auto& nc : configs) {
        FlConfig cfg = m.fl;
        cfg.ablation = nc.flags;
        std::vector<TrialOutcome> trials = run_trials(cfg, m.seeds, opts.threads);
        std::vector<double> accs, losses, mias;
        uint64_t bytes_up = 0;
        for (const auto& t : trials) {
            const RoundReport& last = t.result.rounds.back();
            accs.push_back(last.global_accuracy);
            losses.push_back(last.loss);
            bytes_up = last.bytes_up_per_client;
            write_text_file(dir + "/" + nc.name + "_trial_" + std::to_string(t.seed) + ".csv",
                            trial_csv(m, t));
        }
        rows.push_back(json{{"config", nc.name},
                            {"accuracy_median", median_of(accs)},
                            {"loss_median", median_of(losses)},
                            {"bytes_up_per_client", bytes_up},
                            {"mb_up_per_client", format_mb_1dp(bytes_up)}});
    }
    json out{{"manifest_hash", m.hash_hex()},
             {"kind", "ablation"},
             {"seeds", m.seeds},
             {"rows", rows}};
    write_text_file(dir + "/ablation_summary.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_account(const ExperimentManifest& m, const CliOptions& opts) {
    const AccountingManifest& a = m.accounting;
    CommBreakdown br = communication_breakdown(a.d, a.sparsity, a.n_clients, a.he, a.packing,
                                               a.slot_model);
    json out = breakdown_to_json(br);
    out["manifest_hash"] = m.hash_hex();

    // The alternative slot model, for the flagged 13-vs-26 discrepancy.
    SlotModel other = a.slot_model == SlotModel::paper_N ? SlotModel::standard_N_half
                                                         : SlotModel::paper_N;
    out["alternative_slot_model"] =
        breakdown_to_json(communication_breakdown(a.d, a.sparsity, a.n_clients, a.he, a.packing,
                                                  other));

    // HE-only baselines: packed and unpacked, bracketing the published 6385 MB.
    CommBreakdown he_packed =
        communication_breakdown(a.d, 0.0, a.n_clients, a.he, a.packing, a.slot_model);
    PackingConfig unpacked = a.packing;
    unpacked.lanes_per_slot = 1;
    CommBreakdown he_unpacked =
        communication_breakdown(a.d, 0.0, a.n_clients, a.he, unpacked, a.slot_model);
    out["he_only"] = json{
        {"packed_total_mb", format_mb_1dp(he_packed.encrypted_bytes_total())},
        {"unpacked_total_mb", format_mb_1dp(he_unpacked.encrypted_bytes_total())},
        {"published_total_mb", 6385},
        {"note", "published figure equals 5 x 1277 exactly (a flat 5x expansion rule); "
                 "neither computed mode reproduces it"}};

    out["security_claim"] = to_string(a.he.security_claim());

    std::string dir = resolve_out_dir(m, opts);
    write_text_file(dir + "/accounting.json", out.dump(2) + "\n");
    write_text_file(dir + "/accounting.txt",
                    "# manifest " + m.hash_hex() + "\n" + render_breakdown_table(br));
    std::cout << render_breakdown_table(br);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_mia(const ExperimentManifest& m, const CliOptions& opts) {
    std::string dir = resolve_out_dir(m, opts);
    std::cout << "security claim: " << to_string(m.fl.he.security_claim()) << "\n";

    struct SeedResult {
        uint64_t seed;
        double overfit, standard_fl, medhe;
    };
    std::vector<SeedResult> results(m.seeds.size());

    parallel_for(m.seeds.size(), opts.threads, [&](size_t i) {
        uint64_t seed = m.seeds[i];

        // MedHE regime: the manifest's pipeline as configured.
        FlConfig medhe_cfg = m.fl;
        medhe_cfg.seed = seed;
        FlState data_state = make_initial_state(medhe_cfg);
        Dataset members;
        members.n_features = data_state.clients.front().data.n_features;
        for (const auto& c : data_state.clients) {
            members.features.insert(members.features.end(), c.data.features.begin(),
                                    c.data.features.end());
            members.labels.insert(members.labels.end(), c.data.labels.begin(),
                                  c.data.labels.end());
        }
        const Dataset& nonmembers = data_state.test_set;
        Model medhe_model = run_experiment(medhe_cfg).final_model;

        // Standard FL: same federation, every privacy mechanism off.
        FlConfig std_cfg = medhe_cfg;
        std_cfg.ablation = {true, true, false, false, false};
        std_cfg.dp.sigma = 0.0;
        Model std_model = run_experiment(std_cfg).final_model;

        // No-privacy baseline: small MLP overfit on a tiny member subset.
        std::vector<size_t> rows;
        for (size_t r = 0; r < std::min(m.mia.overfit_train_size, members.size()); ++r)
            rows.push_back(r);
        Dataset small = subset(members, rows);
        Model overfit = local_train(
            Model::random_init({ModelKind::mlp, members.n_features, 16}, seed, 0.3), small,
            {0.5, m.mia.overfit_epochs, 8, 0.0}, seed);

        results[i] = {seed,
                      mia_attack(overfit, small, nonmembers, seed).attack_success_rate,
                      mia_attack(std_model, members, nonmembers, seed).attack_success_rate,
                      mia_attack(medhe_model, members, nonmembers, seed).attack_success_rate};
    });

    std::vector<double> over, std_fl, med;
    json per_seed = json::array();
    for (const auto& r : results) {
        over.push_back(r.overfit);
        std_fl.push_back(r.standard_fl);
        med.push_back(r.medhe);
        per_seed.push_back(json{{"seed", r.seed},
                                {"no_privacy_overfit", r.overfit},
                                {"standard_fl", r.standard_fl},
                                {"medhe", r.medhe}});
    }
    json out{{"manifest_hash", m.hash_hex()},
             {"kind", "mia"},
             {"convention", "success = balanced accuracy at the best threshold chosen on the "
                            "evaluation split (strongest adversary); 0.5 = random guessing"},
             {"per_seed", per_seed},
             {"medians", {{"no_privacy_overfit", median_of(over)},
                          {"standard_fl", median_of(std_fl)},
                          {"medhe", median_of(med)}}}};
    write_text_file(dir + "/mia.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_converge(const ExperimentManifest& m, const CliOptions& opts) {
    std::string dir = resolve_out_dir(m, opts);
    const ConvergenceManifest& c = m.convergence;

    json out{{"manifest_hash", m.hash_hex()}, {"kind", "convergence"}};
    json grid = json::array();
    for (double s : c.sparsity_grid) {
        const size_t n_seeds = m.seeds.size();
        std::vector<double> slope_slots(n_seeds, std::nan(""));
        std::vector<double> final_ef(n_seeds, 0.0), final_noef(n_seeds, 0.0);
        std::vector<std::vector<double>> ef_trajectories(n_seeds);

        parallel_for(n_seeds, opts.threads, [&](size_t i) {
            QuadraticProblem p = QuadraticProblem::random(c.dim, c.noise_level, m.seeds[i]);
            SparseSgdOptions o;
            o.sparsity = s;
            o.steps = c.steps;
            o.lr = c.lr > 0.0 ? c.lr : 0.05 / p.smoothness();
            o.sqrt_decay = c.sqrt_decay;
            o.seed = m.seeds[i];

            o.error_feedback = true;
            SgdRun with_ef = run_sparse_sgd(p, o);
            o.error_feedback = false;
            SgdRun without_ef = run_sparse_sgd(p, o);
            ef_trajectories[i] = with_ef.suboptimality;

            RateFit fit = fit_convergence_rate(with_ef.suboptimality);
            if (fit.valid) slope_slots[i] = fit.slope;
            final_ef[i] = with_ef.suboptimality.back();
            final_noef[i] = without_ef.suboptimality.back();
        });

        std::vector<double> slopes_ef;
        for (double sl : slope_slots)
            if (!std::isnan(sl)) slopes_ef.push_back(sl);

        // Trajectory CSV, one column per seed.
        std::ostringstream csv;
        csv << "# manifest " << m.hash_hex() << " sparsity " << s << "\nstep";
        for (uint64_t seed : m.seeds) csv << ",ef_seed" << seed;
        csv << "\n";
        size_t steps = ef_trajectories.front().size();
        for (size_t t = 0; t < steps; ++t) {
            csv << (t + 1);
            for (const auto& traj : ef_trajectories)
                csv << "," << (t < traj.size() ? traj[t] : 0.0);
            csv << "\n";
        }
        std::ostringstream name;
        name << dir << "/trajectory_s" << s << ".csv";
        write_text_file(name.str(), csv.str());

        // Chart: log10 suboptimality per seed, downsampled.
        size_t stride = std::max<size_t>(1, steps / 200);
        std::vector<double> xs;
        for (size_t t = 0; t < steps; t += stride) xs.push_back(static_cast<double>(t + 1));
        std::vector<std::pair<std::string, std::vector<double>>> series;
        for (size_t i = 0; i < ef_trajectories.size(); ++i) {
            std::vector<double> ys;
            for (size_t t = 0; t < steps; t += stride)
                ys.push_back(std::log10(std::max(ef_trajectories[i][t], 1e-300)));
            series.emplace_back("seed " + std::to_string(m.seeds[i]), std::move(ys));
        }
        std::ostringstream svg_name;
        svg_name << dir << "/trajectory_s" << s << ".svg";
        std::ostringstream title;
        title << "sparse SGD with error feedback, s=" << s;
        write_text_file(svg_name.str(),
                        provenance_comment(m) +
                            svg_line_chart(title.str(), "step", "log10 suboptimality", xs, series));

        grid.push_back(json{{"sparsity", s},
                            {"slope_median", slopes_ef.empty() ? json(nullptr)
                                                               : json(median_of(slopes_ef))},
                            {"final_with_ef_median", median_of(final_ef)},
                            {"final_without_ef_median", median_of(final_noef)}});
    }
    out["grid"] = grid;
    write_text_file(dir + "/convergence.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const ExperimentManifest& m, const CliOptions& opts) {
    std::string dir = resolve_out_dir(m, opts);
    std::cout << "security claim: " << to_string(m.fl.he.security_claim()) << "\n";

    json rows = json::array();
    std::vector<double> xs, acc_series, mb_series;
    std::ostringstream csv;
    // Ciphertext bytes plateau at desk dimensions (one ciphertext covers the
    // whole model); retained_k and its 4-byte payload carry the strictly
    // decreasing communication signal.
    csv << "# manifest " << m.hash_hex() << "\nsparsity,accuracy_median,accuracy_mean,"
        << "retained_k,sparse_payload_bytes,bytes_up_per_client,mb_up_per_client\n";

    for (double s : m.sparsity_grid) {
        FlConfig cfg = m.fl;
        cfg.sparsifier.sparsity = s;
        std::vector<TrialOutcome> trials = run_trials(cfg, m.seeds, opts.threads);
        std::vector<double> accs;
        uint64_t bytes_up = 0;
        for (const auto& t : trials) {
            accs.push_back(t.result.rounds.back().global_accuracy);
            bytes_up = t.result.rounds.back().bytes_up_per_client;
        }
        double med = median_of(accs);
        uint64_t k = retained_count(cfg.arch().dim(), s);
        csv << s << ',' << med << ',' << mean_of(accs) << ',' << k << ',' << k * 4 << ','
            << bytes_up << ',' << format_mb_2dp(bytes_up) << "\n";
        rows.push_back(json{{"sparsity", s},
                            {"accuracy_median", med},
                            {"accuracy_mean", mean_of(accs)},
                            {"retained_k", k},
                            {"sparse_payload_bytes", k * 4},
                            {"bytes_up_per_client", bytes_up}});
        xs.push_back(s);
        acc_series.push_back(med);
        mb_series.push_back(static_cast<double>(mb_hundredths(bytes_up)) / 100.0);
    }

    write_text_file(dir + "/sweep.csv", csv.str());
    write_text_file(dir + "/sweep.json",
                    json{{"manifest_hash", m.hash_hex()}, {"rows", rows}}.dump(2) + "\n");
    write_text_file(dir + "/accuracy_vs_sparsity.svg",
                    provenance_comment(m) +
                        svg_line_chart("accuracy vs sparsity", "sparsity", "median accuracy", xs,
                                       {{"accuracy", acc_series}}));
    write_text_file(dir + "/mb_vs_sparsity.svg",
                    provenance_comment(m) +
                        svg_line_chart("upload vs sparsity", "sparsity", "MB per client", xs,
                                       {{"MB", mb_series}}));
    std::cout << "wrote sweep results to " << dir << "\n";
    return 0;
}

int cmd_ttest(const std::string& path_a, const std::string& path_b) {
    auto load = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open summary '" + path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError("summary parse error in '" + path + "': " + e.what());
        }
        if (!j.contains("trials")) throw ConfigError("'" + path + "' has no trials array");
        std::vector<uint64_t> seeds;
        std::vector<double> accs;
        for (const auto& t : j["trials"]) {
            seeds.push_back(t.at("seed").get<uint64_t>());
            accs.push_back(t.at("final_accuracy").get<double>());
        }
        return std::make_pair(seeds, accs);
    };

    auto [seeds_a, accs_a] = load(path_a);
    auto [seeds_b, accs_b] = load(path_b);
    if (seeds_a != seeds_b) throw ConfigError("summaries were produced from different seed lists");

    TTestResult r = paired_ttest(accs_a, accs_b);
    json out{{"t_stat", json_number(r.t_stat)},
             {"dof", r.dof},
             {"p_value", r.p_value},
             {"degenerate_zero_variance", r.degenerate_zero_variance},
             {"seeds", seeds_a}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int dispatch(const ExperimentManifest& m, const CliOptions& opts) {
    switch (m.kind) {
        case ExperimentKind::fl_run: return cmd_fl_run(m, opts);
        case ExperimentKind::ablation: return cmd_ablation(m, opts);
        case ExperimentKind::accounting: return cmd_account(m, opts);
        case ExperimentKind::mia: return cmd_mia(m, opts);
        case ExperimentKind::convergence: return cmd_converge(m, opts);
        case ExperimentKind::sparsity_sweep: return cmd_sweep(m, opts);
    }
    throw ConfigError("unhandled experiment kind");
}

void require_kind(const ExperimentManifest& m, ExperimentKind want) {
    if (m.kind != want)
        throw ConfigError("this subcommand needs a manifest of kind '" + to_string(want) +
                          "', got '" + to_string(m.kind) + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"medhe: communication-efficient privacy-preserving FL simulator"};
    app.require_subcommand(1);

    CliOptions opts;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--manifest", opts.manifest_path, "experiment manifest (JSON)");
        cmd->add_option("--out", opts.out_override, "output root directory");
        cmd->add_option("--threads", opts.threads, "parallel trials (default: MEDHE_THREADS or 1)");
        cmd->add_option("--seed-override", opts.seed_override, "replace the manifest seed list");
    };

    CLI::App* c_run = app.add_subcommand("run", "run the experiment described by a manifest");
    CLI::App* c_sweep = app.add_subcommand("sweep", "sparsity sweep (kind sparsity_sweep)");
    CLI::App* c_account = app.add_subcommand("account", "communication accounting (kind accounting)");
    CLI::App* c_attack = app.add_subcommand("attack", "membership-inference harness (kind mia)");
    CLI::App* c_converge = app.add_subcommand("converge", "convergence lab (kind convergence)");
    for (CLI::App* c : {c_run, c_sweep, c_account, c_attack, c_converge}) add_common(c);

    CLI::App* c_ttest = app.add_subcommand("ttest", "paired t-test over two trial summaries");
    std::string summary_a, summary_b;
    c_ttest->add_option("summary_a", summary_a, "first summary.json")->required();
    c_ttest->add_option("summary_b", summary_b, "second summary.json")->required();

    CLI::App* c_schema = app.add_subcommand("schema", "print the manifest JSON schema");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_schema->parsed()) {
            std::cout << manifest_schema_json() << "\n";
            return 0;
        }
        if (c_ttest->parsed()) return cmd_ttest(summary_a, summary_b);

        ExperimentManifest m = load_manifest(opts);
        if (c_run->parsed()) return dispatch(m, opts);
        if (c_sweep->parsed()) {
            require_kind(m, ExperimentKind::sparsity_sweep);
            return cmd_sweep(m, opts);
        }
        if (c_account->parsed()) {
            require_kind(m, ExperimentKind::accounting);
            return cmd_account(m, opts);
        }
        if (c_attack->parsed()) {
            require_kind(m, ExperimentKind::mia);
            return cmd_mia(m, opts);
        }
        if (c_converge->parsed()) {
            require_kind(m, ExperimentKind::convergence);
            return cmd_converge(m, opts);
        }
        throw ConfigError("no subcommand matched");
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", e.what()}, {"type", "config"}}.dump() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << json{{"error", e.what()}, {"type", "runtime"}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"type", "runtime"}}.dump() << "\n";
        return 1;
    }
}
