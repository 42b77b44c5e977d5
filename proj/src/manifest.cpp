#include "medhe/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "medhe/errors.hpp"

namespace medhe {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

template <typename T>
T opt(const json& j, const char* key, T fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    try {
        return v->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest field '") + key + "': " + e.what());
    }
}

SlotModel parse_slot_model(const std::string& s) {
    if (s == "paper_N") return SlotModel::paper_N;
    if (s == "standard_N_half") return SlotModel::standard_N_half;
    throw ConfigError("unknown slot_model '" + s + "' (paper_N | standard_N_half)");
}

LogConvention parse_log_convention(const std::string& s) {
    if (s == "natural") return LogConvention::natural;
    if (s == "base10") return LogConvention::base10;
    throw ConfigError("unknown log_convention '" + s + "' (natural | base10)");
}

EpsilonVariant parse_variant(const std::string& s) {
    if (s == "theorem") return EpsilonVariant::theorem_statement;
    if (s == "proof") return EpsilonVariant::proof_quadratic;
    throw ConfigError("unknown dp variant '" + s + "' (theorem | proof)");
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "logistic") return ModelKind::logistic;
    if (s == "mlp") return ModelKind::mlp;
    throw ConfigError("unknown model kind '" + s + "' (logistic | mlp)");
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "fl_run") return ExperimentKind::fl_run;
    if (s == "ablation") return ExperimentKind::ablation;
    if (s == "accounting") return ExperimentKind::accounting;
    if (s == "mia") return ExperimentKind::mia;
    if (s == "convergence") return ExperimentKind::convergence;
    if (s == "sparsity_sweep") return ExperimentKind::sparsity_sweep;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

CkksParams parse_he(const json& j, CkksParams base) {
    base.ring_dimension = opt<size_t>(j, "ring_dimension", base.ring_dimension);
    base.q_bits = opt<int>(j, "q_bits", base.q_bits);
    base.scale_log2 = opt<int>(j, "scale_log2", base.scale_log2);
    base.noise_stddev = opt<double>(j, "noise_stddev", base.noise_stddev);
    return base;
}

PackingConfig parse_packing(const json& j, PackingConfig base) {
    base.lanes_per_slot = opt<int>(j, "lanes_per_slot", base.lanes_per_slot);
    base.lane_bits = opt<int>(j, "lane_bits", base.lane_bits);
    base.guard_bits = opt<int>(j, "guard_bits", base.guard_bits);
    base.clip_range = opt<double>(j, "clip_range", base.clip_range);
    return base;
}

FlConfig parse_fl(const json& j) {
    FlConfig cfg;
    // Desk defaults favour exact lane recovery over wide packing.
    cfg.he = CkksParams{1024, 61, 24, 3.2};
    cfg.packing = PackingConfig{2, 8, 8, 1.0};

    cfg.n_clients = opt<int>(j, "n_clients", cfg.n_clients);
    cfg.rounds = opt<int>(j, "rounds", cfg.rounds);
    cfg.lr = opt<double>(j, "lr", cfg.lr);
    cfg.local_epochs = opt<int>(j, "local_epochs", cfg.local_epochs);
    cfg.batch_size = opt<size_t>(j, "batch_size", cfg.batch_size);
    cfg.weight_decay = opt<double>(j, "weight_decay", cfg.weight_decay);
    cfg.min_quorum = opt<int>(j, "min_quorum", cfg.min_quorum);
    cfg.dropout_prob = opt<double>(j, "dropout_prob", cfg.dropout_prob);
    cfg.straggler_prob = opt<double>(j, "straggler_prob", cfg.straggler_prob);
    cfg.straggler_delay_rounds = opt<int>(j, "straggler_delay_rounds", cfg.straggler_delay_rounds);
    cfg.staleness_limit = opt<int>(j, "staleness_limit", cfg.staleness_limit);
    cfg.client_timeout = opt<double>(j, "client_timeout", cfg.client_timeout);
    cfg.dirichlet_alpha = opt<double>(j, "dirichlet_alpha", cfg.dirichlet_alpha);
    cfg.test_fraction = opt<double>(j, "test_fraction", cfg.test_fraction);

    if (const json* s = find(j, "sparsifier")) {
        cfg.sparsifier.sparsity = opt<double>(*s, "sparsity", cfg.sparsifier.sparsity);
        cfg.sparsifier.adaptation_rate =
            opt<double>(*s, "adaptation_rate", cfg.sparsifier.adaptation_rate);
    }
    if (const json* s = find(j, "dp")) {
        cfg.dp.sensitivity = opt<double>(*s, "sensitivity", cfg.dp.sensitivity);
        cfg.dp.sigma = opt<double>(*s, "sigma", cfg.dp.sigma);
        cfg.dp.delta = opt<double>(*s, "delta", cfg.dp.delta);
        cfg.dp.log_convention =
            parse_log_convention(opt<std::string>(*s, "log_convention", "natural"));
        cfg.dp.variant = parse_variant(opt<std::string>(*s, "variant", "theorem"));
    }
    if (const json* s = find(j, "he")) cfg.he = parse_he(*s, cfg.he);
    if (const json* s = find(j, "packing")) cfg.packing = parse_packing(*s, cfg.packing);
    cfg.slot_model = parse_slot_model(opt<std::string>(j, "slot_model", "paper_N"));
    if (const json* s = find(j, "ablation")) {
        cfg.ablation.error_feedback = opt<bool>(*s, "error_feedback", true);
        cfg.ablation.adaptive_threshold = opt<bool>(*s, "adaptive_threshold", true);
        cfg.ablation.packing = opt<bool>(*s, "packing", true);
        cfg.ablation.encryption = opt<bool>(*s, "encryption", true);
        cfg.ablation.sparsification = opt<bool>(*s, "sparsification", true);
    }
    if (const json* s = find(j, "data")) {
        cfg.data.n_samples = opt<size_t>(*s, "n_samples", cfg.data.n_samples);
        cfg.data.n_features = opt<size_t>(*s, "n_features", cfg.data.n_features);
        cfg.data.separation = opt<double>(*s, "separation", cfg.data.separation);
        cfg.data.noise = opt<double>(*s, "noise", cfg.data.noise);
    }
    if (const json* s = find(j, "model")) {
        cfg.model_kind = parse_model_kind(opt<std::string>(*s, "kind", "logistic"));
        cfg.hidden = opt<size_t>(*s, "hidden", cfg.hidden);
    }
    return cfg;
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::fl_run: return "fl_run";
        case ExperimentKind::ablation: return "ablation";
        case ExperimentKind::accounting: return "accounting";
        case ExperimentKind::mia: return "mia";
        case ExperimentKind::convergence: return "convergence";
        case ExperimentKind::sparsity_sweep: return "sparsity_sweep";
    }
    return "unknown";
}

uint64_t ExperimentManifest::hash() const {
    uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (unsigned char c : canonical_json) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string ExperimentManifest::hash_hex() const {
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

ExperimentManifest ExperimentManifest::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

ExperimentManifest ExperimentManifest::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("manifest parse error: ") + e.what());
    }

    ExperimentManifest m;
    m.schema_version = opt<int>(j, "schema_version", -1);
    if (m.schema_version != 1)
        throw ConfigError("unsupported schema_version " + std::to_string(m.schema_version) +
                          " (expected 1)");
    m.kind = parse_kind(opt<std::string>(j, "kind", ""));
    m.output_dir = opt<std::string>(j, "output_dir", m.output_dir);
    m.seeds = opt<std::vector<uint64_t>>(j, "seeds", {});
    m.epsilon_target = opt<double>(j, "epsilon_target", 0.0);

    const bool statistical = m.kind != ExperimentKind::accounting;
    if (statistical && m.seeds.empty())
        throw ConfigError("field 'seeds' must be non-empty for kind " + to_string(m.kind));

    if (const json* fl = find(j, "fl")) m.fl = parse_fl(*fl);

    if (const json* a = find(j, "accounting")) {
        m.accounting.d = opt<uint64_t>(*a, "d", m.accounting.d);
        m.accounting.sparsity = opt<double>(*a, "sparsity", m.accounting.sparsity);
        m.accounting.n_clients = opt<int>(*a, "n_clients", m.accounting.n_clients);
        if (const json* he = find(*a, "he")) m.accounting.he = parse_he(*he, m.accounting.he);
        if (const json* pc = find(*a, "packing"))
            m.accounting.packing = parse_packing(*pc, m.accounting.packing);
        m.accounting.slot_model =
            parse_slot_model(opt<std::string>(*a, "slot_model", "paper_N"));
    }

    if (const json* c = find(j, "convergence")) {
        m.convergence.dim = opt<size_t>(*c, "dim", m.convergence.dim);
        m.convergence.noise_level = opt<double>(*c, "noise_level", m.convergence.noise_level);
        m.convergence.sparsity_grid =
            opt<std::vector<double>>(*c, "sparsity_grid", m.convergence.sparsity_grid);
        m.convergence.steps = opt<int>(*c, "steps", m.convergence.steps);
        m.convergence.lr = opt<double>(*c, "lr", m.convergence.lr);
        m.convergence.sqrt_decay = opt<bool>(*c, "sqrt_decay", m.convergence.sqrt_decay);
    }

    if (const json* mi = find(j, "mia")) {
        m.mia.overfit_epochs = opt<int>(*mi, "overfit_epochs", m.mia.overfit_epochs);
        m.mia.overfit_train_size = opt<size_t>(*mi, "overfit_train_size", m.mia.overfit_train_size);
    }

    m.sparsity_grid = opt<std::vector<double>>(j, "sparsity_grid", m.sparsity_grid);

    if (m.epsilon_target > 0.0) {
        m.fl.dp.sigma = sigma_for_epsilon(m.epsilon_target, m.fl.sparsifier.sparsity,
                                          m.fl.dp.sensitivity,
                                          static_cast<uint64_t>(m.fl.rounds));
    }

    m.canonical_json = j.dump();
    return m;
}

std::string manifest_schema_json() {
    static const char* kSchema = R"SCHEMA({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "medhe experiment manifest",
  "type": "object",
  "required": ["schema_version", "kind"],
  "properties": {
    "schema_version": {"const": 1},
    "kind": {"enum": ["fl_run", "ablation", "accounting", "mia", "convergence", "sparsity_sweep"]},
    "output_dir": {"type": "string", "default": "out"},
    "seeds": {"type": "array", "items": {"type": "integer", "minimum": 0},
              "description": "required (non-empty) for every kind except accounting"},
    "epsilon_target": {"type": "number", "minimum": 0,
                       "description": "if > 0, dp.sigma is derived as (1-s)*D2*sqrt(T)/sqrt(2*eps)"},
    "fl": {
      "type": "object",
      "properties": {
        "n_clients": {"type": "integer", "minimum": 1, "default": 5},
        "rounds": {"type": "integer", "minimum": 1, "default": 3},
        "lr": {"type": "number", "default": 0.1},
        "local_epochs": {"type": "integer", "minimum": 1, "default": 1},
        "batch_size": {"type": "integer", "minimum": 1, "default": 16},
        "weight_decay": {"type": "number", "default": 0.0},
        "min_quorum": {"type": "integer", "minimum": 1, "default": 1},
        "dropout_prob": {"type": "number", "minimum": 0, "maximum": 1, "default": 0},
        "straggler_prob": {"type": "number", "minimum": 0, "maximum": 1, "default": 0},
        "straggler_delay_rounds": {"type": "integer", "minimum": 1, "default": 1},
        "staleness_limit": {"type": "integer", "minimum": 0, "default": 2},
        "client_timeout": {"type": "number", "default": 300.0},
        "dirichlet_alpha": {"type": "number", "exclusiveMinimum": 0, "default": 0.1},
        "test_fraction": {"type": "number", "default": 0.25},
        "sparsifier": {"type": "object", "properties": {
          "sparsity": {"type": "number", "minimum": 0, "maximum": 1, "default": 0.9},
          "adaptation_rate": {"type": "number", "default": 0.7}}},
        "dp": {"type": "object", "properties": {
          "sensitivity": {"type": "number", "default": 1.0},
          "sigma": {"type": "number", "minimum": 0, "default": 0.0},
          "delta": {"type": "number", "default": 1e-5},
          "log_convention": {"enum": ["natural", "base10"], "default": "natural"},
          "variant": {"enum": ["theorem", "proof"], "default": "theorem"}}},
        "he": {"type": "object", "properties": {
          "ring_dimension": {"type": "integer", "default": 1024},
          "q_bits": {"type": "integer", "default": 61},
          "scale_log2": {"type": "integer", "default": 24},
          "noise_stddev": {"type": "number", "default": 3.2}}},
        "packing": {"type": "object", "properties": {
          "lanes_per_slot": {"type": "integer", "minimum": 1, "default": 2},
          "lane_bits": {"type": "integer", "default": 8},
          "guard_bits": {"type": "integer", "default": 8},
          "clip_range": {"type": "number", "default": 1.0}}},
        "slot_model": {"enum": ["paper_N", "standard_N_half"], "default": "paper_N"},
        "ablation": {"type": "object", "properties": {
          "error_feedback": {"type": "boolean", "default": true},
          "adaptive_threshold": {"type": "boolean", "default": true},
          "packing": {"type": "boolean", "default": true},
          "encryption": {"type": "boolean", "default": true},
          "sparsification": {"type": "boolean", "default": true}}},
        "data": {"type": "object", "properties": {
          "n_samples": {"type": "integer", "default": 1000},
          "n_features": {"type": "integer", "default": 2},
          "separation": {"type": "number", "default": 2.0},
          "noise": {"type": "number", "default": 1.0}}},
        "model": {"type": "object", "properties": {
          "kind": {"enum": ["logistic", "mlp"], "default": "logistic"},
          "hidden": {"type": "integer", "default": 8}}}
      }
    },
    "accounting": {
      "type": "object",
      "properties": {
        "d": {"type": "integer", "default": 66955010},
        "sparsity": {"type": "number", "default": 0.9},
        "n_clients": {"type": "integer", "default": 5},
        "he": {"$ref": "#/properties/fl/properties/he"},
        "packing": {"$ref": "#/properties/fl/properties/packing"},
        "slot_model": {"enum": ["paper_N", "standard_N_half"], "default": "paper_N"}
      }
    },
    "convergence": {
      "type": "object",
      "properties": {
        "dim": {"type": "integer", "default": 200},
        "noise_level": {"type": "number", "default": 0.0},
        "sparsity_grid": {"type": "array", "items": {"type": "number"}},
        "steps": {"type": "integer", "default": 2000},
        "lr": {"type": "number", "default": 0.0, "description": "0 selects 1/L"},
        "sqrt_decay": {"type": "boolean", "default": false}
      }
    },
    "mia": {
      "type": "object",
      "properties": {
        "overfit_epochs": {"type": "integer", "default": 500},
        "overfit_train_size": {"type": "integer", "default": 50}
      }
    },
    "sparsity_grid": {"type": "array", "items": {"type": "number"},
                      "description": "grid for kind=sparsity_sweep"}
  }
})SCHEMA";
    return kSchema;
}

}  // namespace medhe
