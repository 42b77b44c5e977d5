#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medhe/orchestrator.hpp"

namespace medhe {

enum class ExperimentKind { fl_run, ablation, accounting, mia, convergence, sparsity_sweep };

std::string to_string(ExperimentKind k);

struct AccountingManifest {
    uint64_t d = 66955010;
    double sparsity = 0.9;
    int n_clients = 5;
    CkksParams he{8192, 240, 40, 3.2};
    PackingConfig packing{64, 8, 8, 1.0};
    SlotModel slot_model = SlotModel::paper_N;
};

struct ConvergenceManifest {
    size_t dim = 200;
    double noise_level = 0.0;
    std::vector<double> sparsity_grid{0.9};
    int steps = 2000;
    double lr = 0.0;  ///< 0 selects 1/L automatically
    bool sqrt_decay = false;
};

struct MiaManifest {
    int overfit_epochs = 500;
    size_t overfit_train_size = 50;
};

/// One experiment description: kind selects which payload applies.
struct ExperimentManifest {
    int schema_version = 1;
    ExperimentKind kind = ExperimentKind::fl_run;
    std::string output_dir = "out";
    std::vector<uint64_t> seeds;

    FlConfig fl;  ///< fl_run / ablation / mia / sparsity_sweep base config
    AccountingManifest accounting;
    ConvergenceManifest convergence;
    MiaManifest mia;
    std::vector<double> sparsity_grid{0.5, 0.8, 0.9, 0.95, 0.99};

    /// > 0: derive dp.sigma from the privacy-utility corollary at this target.
    double epsilon_target = 0.0;

    std::string canonical_json;  ///< re-serialized manifest used for hashing

    uint64_t hash() const;
    std::string hash_hex() const;

    static ExperimentManifest from_file(const std::string& path);
    static ExperimentManifest from_json_text(const std::string& text);
};

/// The published manifest schema (served by the `schema` subcommand).
std::string manifest_schema_json();

}  // namespace medhe
