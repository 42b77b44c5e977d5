#pragma once

#include <cstdint>

#include "medhe/model.hpp"

namespace medhe {

/// Confidence-threshold membership inference. Success rate is balanced
/// accuracy at the best threshold chosen on the evaluation split itself
/// (strongest-adversary convention); 0.5 means random guessing.
struct MiaResult {
    double attack_success_rate = 0.5;
    double auc = 0.5;
    size_t n_members = 0;
    size_t n_nonmembers = 0;
    double threshold = 0.0;
};

MiaResult mia_attack(const Model& model, const Dataset& members, const Dataset& nonmembers,
                     uint64_t seed);

}  // namespace medhe
