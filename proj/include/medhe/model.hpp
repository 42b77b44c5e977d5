#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace medhe {

/// Flat real-valued gradient / weight-delta of dimension d.
using GradientVector = std::vector<double>;

struct Dataset {
    std::vector<double> features;  ///< row-major, size() x n_features
    std::vector<int> labels;       ///< binary, 0/1
    size_t n_features = 0;

    size_t size() const { return labels.size(); }
    const double* row(size_t i) const { return features.data() + i * n_features; }
    void validate() const;
};

enum class ModelKind { logistic, mlp };

/// Architecture descriptor; dim() is the flattened parameter count d.
struct ModelArch {
    ModelKind kind = ModelKind::logistic;
    size_t n_features = 0;
    size_t hidden = 0;  ///< hidden width, mlp only

    size_t dim() const;
    bool operator==(const ModelArch&) const = default;
};

struct Model {
    ModelArch arch;
    std::vector<double> weights;

    static Model zeros(const ModelArch& arch);
    static Model random_init(const ModelArch& arch, uint64_t seed, double stddev = 0.1);
};

struct TrainConfig {
    double lr = 0.1;
    int epochs = 1;
    size_t batch_size = 32;
    double weight_decay = 0.0;
};

struct EvalMetrics {
    double accuracy = 0.0;
    double f1 = 0.0;
    double loss = 0.0;
};

/// P(y=1 | x) for one row.
double predict_proba(const Model& model, const double* x);

/// Mean binary cross-entropy over the given rows plus L2 weight decay
/// (bias terms excluded from the decay).
double loss_value(const Model& model, const Dataset& data, const std::vector<size_t>& rows,
                  double weight_decay);

/// Analytic gradient of loss_value with respect to the flattened weights.
GradientVector loss_gradient(const Model& model, const Dataset& data,
                             const std::vector<size_t>& rows, double weight_decay);

/// Mini-batch SGD over a seeded shuffle per epoch; deterministic per seed.
/// A non-finite batch loss raises DivergenceError naming the batch.
Model local_train(const Model& model, const Dataset& data, const TrainConfig& cfg, uint64_t seed);

/// after.weights - before.weights; architectures must match.
GradientVector compute_update(const Model& before, const Model& after);

EvalMetrics evaluate(const Model& model, const Dataset& data);

/// Non-IID shards: per-class client proportions drawn from Dirichlet(alpha).
/// Every sample lands in exactly one shard and every client gets at least
/// one sample (refilled from the largest shard when needed).
std::vector<Dataset> partition_dirichlet(const Dataset& dataset, int n_clients, double alpha,
                                         uint64_t seed);

struct SyntheticSpec {
    size_t n_samples = 1000;
    size_t n_features = 2;
    double separation = 2.0;  ///< L2 distance between the class means
    double noise = 1.0;       ///< per-dimension stddev
};

/// Two Gaussian class-conditional clusters, balanced labels.
Dataset make_synthetic(const SyntheticSpec& spec, uint64_t seed);

Dataset subset(const Dataset& data, const std::vector<size_t>& rows);

struct TrainTestSplit {
    Dataset train;
    Dataset test;
};

TrainTestSplit split_dataset(const Dataset& data, double test_fraction, uint64_t seed);

}  // namespace medhe
