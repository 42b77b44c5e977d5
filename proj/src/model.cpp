#include "medhe/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "medhe/errors.hpp"
#include "medhe/rng.hpp"

namespace medhe {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double bce(double p, int y) {
    constexpr double eps = 1e-12;
    p = std::clamp(p, eps, 1.0 - eps);
    return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

// MLP weight layout: W1 (hidden x features, row-major), b1, w2, b2.
struct MlpView {
    const double* w1;
    const double* b1;
    const double* w2;
    const double* b2;
};

MlpView mlp_view(const Model& m) {
    const size_t f = m.arch.n_features, h = m.arch.hidden;
    const double* p = m.weights.data();
    return {p, p + h * f, p + h * f + h, p + h * f + 2 * h};
}

double mlp_forward(const Model& m, const double* x, std::vector<double>* hidden_out) {
    const size_t f = m.arch.n_features, h = m.arch.hidden;
    MlpView v = mlp_view(m);
    double z2 = v.b2[0];
    for (size_t j = 0; j < h; ++j) {
        double z = v.b1[j];
        const double* row = v.w1 + j * f;
        for (size_t i = 0; i < f; ++i) z += row[i] * x[i];
        double a = std::tanh(z);
        if (hidden_out) (*hidden_out)[j] = a;
        z2 += v.w2[j] * a;
    }
    return z2;
}

}  // namespace

void Dataset::validate() const {
    if (features.size() != labels.size() * n_features)
        throw ConfigError("dataset feature matrix does not match label count");
    int pos = 0, neg = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw ConfigError("labels must be binary");
        (y == 1 ? pos : neg) += 1;
    }
    if (pos < 2 || neg < 2) throw ConfigError("need at least 2 samples per class");
    for (double v : features)
        if (!std::isfinite(v)) throw ConfigError("non-finite feature value");
}

size_t ModelArch::dim() const {
    if (kind == ModelKind::logistic) return n_features + 1;
    return hidden * n_features + hidden + hidden + 1;
}

Model Model::zeros(const ModelArch& arch) {
    Model m;
    m.arch = arch;
    m.weights.assign(arch.dim(), 0.0);
    return m;
}

Model Model::random_init(const ModelArch& arch, uint64_t seed, double stddev) {
    Model m = zeros(arch);
    Rng rng(derive_seed(seed, 0x696e6974ULL));
    for (auto& w : m.weights) w = stddev * rng.next_gaussian();
    return m;
}

double predict_proba(const Model& model, const double* x) {
    if (model.arch.kind == ModelKind::logistic) {
        const size_t f = model.arch.n_features;
        double z = model.weights[f];  // bias
        for (size_t i = 0; i < f; ++i) z += model.weights[i] * x[i];
        return sigmoid(z);
    }
    return sigmoid(mlp_forward(model, x, nullptr));
}

double loss_value(const Model& model, const Dataset& data, const std::vector<size_t>& rows,
                  double weight_decay) {
    if (rows.empty()) throw ContractViolation("loss_value: empty batch");
    double total = 0.0;
    for (size_t r : rows) total += bce(predict_proba(model, data.row(r)), data.labels[r]);
    double loss = total / static_cast<double>(rows.size());

    if (weight_decay > 0.0) {
        double sq = 0.0;
        const size_t f = model.arch.n_features, h = model.arch.hidden;
        if (model.arch.kind == ModelKind::logistic) {
            for (size_t i = 0; i < f; ++i) sq += model.weights[i] * model.weights[i];
        } else {
            for (size_t i = 0; i < h * f; ++i) sq += model.weights[i] * model.weights[i];
            MlpView v = mlp_view(model);
            for (size_t j = 0; j < h; ++j) sq += v.w2[j] * v.w2[j];
        }
        loss += 0.5 * weight_decay * sq;
    }
    return loss;
}

GradientVector loss_gradient(const Model& model, const Dataset& data,
                             const std::vector<size_t>& rows, double weight_decay) {
    if (rows.empty()) throw ContractViolation("loss_gradient: empty batch");
    const size_t f = model.arch.n_features;
    GradientVector grad(model.arch.dim(), 0.0);
    const double inv_m = 1.0 / static_cast<double>(rows.size());

    if (model.arch.kind == ModelKind::logistic) {
        for (size_t r : rows) {
            const double* x = data.row(r);
            double err = (predict_proba(model, x) - data.labels[r]) * inv_m;
            for (size_t i = 0; i < f; ++i) grad[i] += err * x[i];
            grad[f] += err;
        }
        if (weight_decay > 0.0)
            for (size_t i = 0; i < f; ++i) grad[i] += weight_decay * model.weights[i];
        return grad;
    }

    const size_t h = model.arch.hidden;
    MlpView v = mlp_view(model);
    std::vector<double> hidden(h);
    double* g_w1 = grad.data();
    double* g_b1 = grad.data() + h * f;
    double* g_w2 = grad.data() + h * f + h;
    double* g_b2 = grad.data() + h * f + 2 * h;
    for (size_t r : rows) {
        const double* x = data.row(r);
        double p = sigmoid(mlp_forward(model, x, &hidden));
        double err = (p - data.labels[r]) * inv_m;
        g_b2[0] += err;
        for (size_t j = 0; j < h; ++j) {
            g_w2[j] += err * hidden[j];
            double dz = err * v.w2[j] * (1.0 - hidden[j] * hidden[j]);
            g_b1[j] += dz;
            double* g_row = g_w1 + j * f;
            for (size_t i = 0; i < f; ++i) g_row[i] += dz * x[i];
        }
    }
    if (weight_decay > 0.0) {
        for (size_t i = 0; i < h * f; ++i) grad[i] += weight_decay * model.weights[i];
        for (size_t j = 0; j < h; ++j) g_w2[j] += weight_decay * v.w2[j];
    }
    return grad;
}

Model local_train(const Model& model, const Dataset& data, const TrainConfig& cfg, uint64_t seed) {
    if (cfg.lr < 0.0) throw ConfigError("learning rate must be non-negative");
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (data.size() == 0) throw ConfigError("cannot train on an empty dataset");

    Model out = model;
    Rng rng(derive_seed(seed, 0x747261696eULL));
    std::vector<size_t> order(data.size());
    std::iota(order.begin(), order.end(), size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        size_t batch_index = 0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
            size_t end = std::min(order.size(), start + cfg.batch_size);
            std::vector<size_t> batch(order.begin() + start, order.begin() + end);
            double batch_loss = loss_value(out, data, batch, cfg.weight_decay);
            if (!std::isfinite(batch_loss))
                throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(batch_index));
            GradientVector grad = loss_gradient(out, data, batch, cfg.weight_decay);
            for (size_t i = 0; i < out.weights.size(); ++i) out.weights[i] -= cfg.lr * grad[i];
        }
    }
    return out;
}

GradientVector compute_update(const Model& before, const Model& after) {
    if (!(before.arch == after.arch))
        throw ContractViolation("compute_update: architecture mismatch");
    GradientVector delta(before.weights.size());
    for (size_t i = 0; i < delta.size(); ++i) delta[i] = after.weights[i] - before.weights[i];
    return delta;
}

EvalMetrics evaluate(const Model& model, const Dataset& data) {
    if (data.size() == 0) throw ContractViolation("evaluate: empty dataset");
    size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double loss = 0.0;
    for (size_t r = 0; r < data.size(); ++r) {
        double p = predict_proba(model, data.row(r));
        loss += bce(p, data.labels[r]);
        bool pred = p >= 0.5;
        bool truth = data.labels[r] == 1;
        if (pred && truth) ++tp;
        else if (pred && !truth) ++fp;
        else if (!pred && truth) ++fn;
        else ++tn;
    }

    EvalMetrics m;
    m.loss = loss / static_cast<double>(data.size());
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(data.size());

    const bool no_pred_pos = (tp + fp) == 0;
    const bool no_true_pos = (tp + fn) == 0;
    if (no_pred_pos && no_true_pos) {
        m.f1 = 1.0;  // degenerate all-negative case: vacuously perfect
    } else if (no_pred_pos || no_true_pos) {
        m.f1 = 0.0;
    } else {
        double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        m.f1 = (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    }
    return m;
}

std::vector<Dataset> partition_dirichlet(const Dataset& dataset, int n_clients, double alpha,
                                         uint64_t seed) {
    if (n_clients < 1) throw ConfigError("n_clients must be >= 1");
    if (alpha <= 0.0) throw ConfigError("Dirichlet alpha must be positive");
    if (dataset.size() < static_cast<size_t>(n_clients))
        throw ConfigError("fewer samples (" + std::to_string(dataset.size()) + ") than clients (" +
                          std::to_string(n_clients) + ")");

    Rng rng(derive_seed(seed, 0x646972ULL));
    std::vector<std::vector<size_t>> shards(n_clients);

    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < dataset.size(); ++i)
            if (dataset.labels[i] == cls) idx.push_back(i);
        if (idx.empty()) continue;
        rng.shuffle(idx);

        std::vector<double> props = rng.next_dirichlet(alpha, static_cast<size_t>(n_clients));
        // Quota split: floors first, leftovers to the largest fractional parts.
        std::vector<size_t> counts(n_clients, 0);
        std::vector<std::pair<double, int>> fracs;
        size_t assigned = 0;
        for (int c = 0; c < n_clients; ++c) {
            double exact = props[c] * static_cast<double>(idx.size());
            counts[c] = static_cast<size_t>(std::floor(exact));
            assigned += counts[c];
            fracs.emplace_back(exact - std::floor(exact), c);
        }
        std::stable_sort(fracs.begin(), fracs.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (size_t r = 0; assigned < idx.size(); ++r, ++assigned) counts[fracs[r % fracs.size()].second] += 1;

        size_t cursor = 0;
        for (int c = 0; c < n_clients; ++c)
            for (size_t j = 0; j < counts[c]; ++j) shards[c].push_back(idx[cursor++]);
    }

    // No client may come up empty: move surplus samples out of the largest shard.
    for (;;) {
        auto empty_it = std::find_if(shards.begin(), shards.end(),
                                     [](const auto& s) { return s.empty(); });
        if (empty_it == shards.end()) break;
        auto largest_it = std::max_element(
            shards.begin(), shards.end(),
            [](const auto& a, const auto& b) { return a.size() < b.size(); });
        if (largest_it->size() <= 1)
            throw ConfigError("cannot give every client a sample");
        empty_it->push_back(largest_it->back());
        largest_it->pop_back();
    }

    std::vector<Dataset> out;
    out.reserve(n_clients);
    for (auto& shard : shards) {
        std::sort(shard.begin(), shard.end());
        out.push_back(subset(dataset, shard));
    }
    return out;
}

Dataset make_synthetic(const SyntheticSpec& spec, uint64_t seed) {
    if (spec.n_samples < 4) throw ConfigError("need at least 4 samples");
    if (spec.n_features < 1) throw ConfigError("need at least 1 feature");

    Rng rng(derive_seed(seed, 0x73796e7468ULL));
    const double offset = 0.5 * spec.separation / std::sqrt(static_cast<double>(spec.n_features));

    Dataset ds;
    ds.n_features = spec.n_features;
    ds.labels.resize(spec.n_samples);
    ds.features.resize(spec.n_samples * spec.n_features);
    for (size_t i = 0; i < spec.n_samples; ++i) {
        int y = static_cast<int>(i % 2);
        ds.labels[i] = y;
        double center = y == 1 ? offset : -offset;
        for (size_t j = 0; j < spec.n_features; ++j)
            ds.features[i * spec.n_features + j] = center + spec.noise * rng.next_gaussian();
    }
    return ds;
}

Dataset subset(const Dataset& data, const std::vector<size_t>& rows) {
    Dataset out;
    out.n_features = data.n_features;
    out.labels.reserve(rows.size());
    out.features.reserve(rows.size() * data.n_features);
    for (size_t r : rows) {
        if (r >= data.size()) throw ContractViolation("subset: row index out of range");
        out.labels.push_back(data.labels[r]);
        const double* x = data.row(r);
        out.features.insert(out.features.end(), x, x + data.n_features);
    }
    return out;
}

TrainTestSplit split_dataset(const Dataset& data, double test_fraction, uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw ConfigError("test_fraction must lie in (0, 1)");
    std::vector<size_t> order(data.size());
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(derive_seed(seed, 0x73706c6974ULL));
    rng.shuffle(order);

    size_t n_test = std::max<size_t>(1, static_cast<size_t>(std::llround(
                                            test_fraction * static_cast<double>(data.size()))));
    n_test = std::min(n_test, data.size() - 1);
    std::vector<size_t> test_rows(order.begin(), order.begin() + n_test);
    std::vector<size_t> train_rows(order.begin() + n_test, order.end());
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());

    TrainTestSplit split;
    split.test = subset(data, test_rows);
    split.train = subset(data, train_rows);
    return split;
}

}  // namespace medhe
