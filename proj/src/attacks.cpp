#include "medhe/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "medhe/errors.hpp"
#include "medhe/rng.hpp"

namespace medhe {

namespace {

std::vector<double> confidences(const Model& model, const Dataset& data) {
    std::vector<double> out(data.size());
    for (size_t i = 0; i < data.size(); ++i) {
        double p = predict_proba(model, data.row(i));
        out[i] = std::max(p, 1.0 - p);
    }
    return out;
}

Dataset balanced_subsample(const Dataset& data, size_t target, uint64_t seed) {
    if (data.size() == target) return data;
    std::vector<size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    Rng rng(derive_seed(seed, 0x62616cULL));
    rng.shuffle(idx);
    idx.resize(target);
    std::sort(idx.begin(), idx.end());
    return subset(data, idx);
}

}  // namespace

MiaResult mia_attack(const Model& model, const Dataset& members, const Dataset& nonmembers,
                     uint64_t seed) {
    if (members.size() == 0 || nonmembers.size() == 0)
        throw ConfigError("mia_attack: member and non-member sets must be non-empty");

    const size_t m = std::min(members.size(), nonmembers.size());
    Dataset mem = balanced_subsample(members, m, derive_seed(seed, 1));
    Dataset non = balanced_subsample(nonmembers, m, derive_seed(seed, 2));

    std::vector<double> conf_mem = confidences(model, mem);
    std::vector<double> conf_non = confidences(model, non);

    // Best balanced accuracy over thresholds; members are flagged by
    // conf >= threshold (training samples score higher confidence).
    std::vector<double> candidates = conf_mem;
    candidates.insert(candidates.end(), conf_non.begin(), conf_non.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(std::numeric_limits<double>::infinity());

    MiaResult result;
    result.n_members = m;
    result.n_nonmembers = m;
    double best = -1.0;
    for (double theta : candidates) {
        size_t tp = 0, tn = 0;
        for (double c : conf_mem)
            if (c >= theta) ++tp;
        for (double c : conf_non)
            if (c < theta) ++tn;
        double balanced = 0.5 * (static_cast<double>(tp) / static_cast<double>(m) +
                                 static_cast<double>(tn) / static_cast<double>(m));
        if (balanced > best) {
            best = balanced;
            result.threshold = theta;
        }
    }
    result.attack_success_rate = best;

    // AUC by Mann-Whitney with midranks for ties.
    struct Scored {
        double value;
        bool member;
    };
    std::vector<Scored> all;
    all.reserve(2 * m);
    for (double c : conf_mem) all.push_back({c, true});
    for (double c : conf_non) all.push_back({c, false});
    std::sort(all.begin(), all.end(),
              [](const Scored& a, const Scored& b) { return a.value < b.value; });

    double rank_sum_members = 0.0;
    size_t i = 0;
    while (i < all.size()) {
        size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
        for (size_t k = i; k < j; ++k)
            if (all[k].member) rank_sum_members += midrank;
        i = j;
    }
    double u = rank_sum_members - 0.5 * static_cast<double>(m) * (static_cast<double>(m) + 1.0);
    result.auc = u / (static_cast<double>(m) * static_cast<double>(m));
    return result;
}

}  // namespace medhe
