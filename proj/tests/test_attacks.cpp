#include <doctest.h>

#include <cmath>

#include "medhe/attacks.hpp"
#include "medhe/errors.hpp"
#include "medhe/rng.hpp"

using namespace medhe;

namespace {

Dataset single_feature(std::vector<double> xs, int label) {
    Dataset ds;
    ds.n_features = 1;
    ds.features = std::move(xs);
    ds.labels.assign(ds.features.size(), label);
    return ds;
}

}  // namespace

TEST_CASE("identical confidence everywhere is indistinguishable") {
    Model m = Model::zeros({ModelKind::logistic, 1, 0});  // p = 0.5 for every input
    Dataset members = single_feature({1, 2, 3, 4, 5, 6, 7, 8}, 1);
    Dataset nonmembers = single_feature({-1, -2, -3, -4, -5, -6, -7, -8}, 0);

    MiaResult r = mia_attack(m, members, nonmembers, 1);
    CHECK(r.attack_success_rate == doctest::Approx(0.5));
    CHECK(r.auc == doctest::Approx(0.5));
}

TEST_CASE("perfectly separated confidences are fully attackable") {
    // p = sigmoid(x): members at |x| = 2.197 -> conf 0.9; non-members at
    // |x| = 0.405 -> conf 0.6.
    Model m = Model::zeros({ModelKind::logistic, 1, 0});
    m.weights = {1.0, 0.0};
    Dataset members = single_feature({2.197, -2.197, 2.197, -2.197}, 1);
    Dataset nonmembers = single_feature({0.405, -0.405, 0.405, -0.405}, 0);

    MiaResult r = mia_attack(m, members, nonmembers, 1);
    CHECK(r.attack_success_rate == doctest::Approx(1.0));
    CHECK(r.auc == doctest::Approx(1.0));
}

TEST_CASE("unbalanced sets are subsampled to balance") {
    Model m = Model::zeros({ModelKind::logistic, 1, 0});
    m.weights = {1.0, 0.0};
    Dataset members = single_feature(std::vector<double>(100, 2.0), 1);
    Dataset nonmembers = single_feature(std::vector<double>(37, 0.1), 0);
    MiaResult r = mia_attack(m, members, nonmembers, 9);
    CHECK(r.n_members == 37);
    CHECK(r.n_nonmembers == 37);
}

TEST_CASE("empty sets are a configuration error") {
    Model m = Model::zeros({ModelKind::logistic, 1, 0});
    Dataset empty;
    empty.n_features = 1;
    Dataset ok = single_feature({1, 2}, 1);
    CHECK_THROWS_AS(mia_attack(m, empty, ok, 1), ConfigError);
    CHECK_THROWS_AS(mia_attack(m, ok, empty, 1), ConfigError);
}

TEST_CASE("label-permutation null keeps success near one half") {
    // One pool, identically distributed; random member/non-member relabeling
    // must look like coin flipping.
    Dataset pool = make_synthetic({2000, 4, 1.0, 1.0}, 77);
    Model m = local_train(Model::zeros({ModelKind::logistic, 4, 0}), pool, {0.1, 3, 32, 0.0}, 5);

    int inside = 0;
    const int shuffles = 100;
    for (int s = 0; s < shuffles; ++s) {
        std::vector<size_t> idx(pool.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(9000 + static_cast<uint64_t>(s));
        rng.shuffle(idx);
        std::vector<size_t> half_a(idx.begin(), idx.begin() + 1000);
        std::vector<size_t> half_b(idx.begin() + 1000, idx.end());
        std::sort(half_a.begin(), half_a.end());
        std::sort(half_b.begin(), half_b.end());

        MiaResult r = mia_attack(m, subset(pool, half_a), subset(pool, half_b),
                                 static_cast<uint64_t>(s));
        if (r.attack_success_rate >= 0.45 && r.attack_success_rate <= 0.55) ++inside;
    }
    CHECK(inside >= 95);
}

TEST_CASE("overfit model leaks more membership signal than a regular one") {
    std::vector<double> overfit_rates, regular_rates;
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Dataset pool = make_synthetic({400, 6, 1.0, 1.0}, 300 + seed);
        TrainTestSplit split = split_dataset(pool, 0.5, seed);

        // A small MLP hammered on a tiny training set interpolates label
        // noise; a linear model trained normally does not.
        std::vector<size_t> first_rows;
        for (size_t i = 0; i < 50; ++i) first_rows.push_back(i);
        Dataset small_train = subset(split.train, first_rows);
        Model overfit = local_train(Model::random_init({ModelKind::mlp, 6, 16}, seed, 0.3),
                                    small_train, {0.5, 500, 8, 0.0}, seed);
        MiaResult r_over = mia_attack(overfit, small_train, split.test, seed);
        overfit_rates.push_back(r_over.attack_success_rate);

        Model regular = local_train(Model::zeros({ModelKind::logistic, 6, 0}), split.train,
                                    {0.1, 3, 32, 0.01}, seed);
        MiaResult r_reg = mia_attack(regular, split.train, split.test, seed);
        regular_rates.push_back(r_reg.attack_success_rate);
    }
    std::sort(overfit_rates.begin(), overfit_rates.end());
    std::sort(regular_rates.begin(), regular_rates.end());
    CHECK(overfit_rates[2] > regular_rates[2]);
}
