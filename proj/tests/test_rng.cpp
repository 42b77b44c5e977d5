#include <doctest.h>

#include <cmath>

#include "medhe/rng.hpp"

using namespace medhe;

TEST_CASE("streams are reproducible and tag-separated") {
    Rng a(123), b(123), c(124);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());

    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
}

TEST_CASE("next_below is in range and roughly uniform") {
    Rng rng(9);
    int buckets[7] = {};
    for (int i = 0; i < 70000; ++i) {
        uint64_t v = rng.next_below(7);
        REQUIRE(v < 7);
        ++buckets[v];
    }
    for (int b : buckets) CHECK(b == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("gaussian moments") {
    Rng rng(31);
    const int n = 200000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        double g = rng.next_gaussian();
        sum += g;
        sumsq += g * g;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::fabs(mean) <= 0.01);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma mean matches its shape, including shape < 1") {
    Rng rng(47);
    for (double shape : {0.1, 0.5, 3.0}) {
        const int n = 50000;
        double sum = 0;
        for (int i = 0; i < n; ++i) sum += rng.next_gamma(shape);
        CHECK(sum / n == doctest::Approx(shape).epsilon(0.05));
    }
}

TEST_CASE("dirichlet draws are simplex points with symmetric mean") {
    Rng rng(88);
    const size_t k = 5;
    std::vector<double> mean(k, 0.0);
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        auto p = rng.next_dirichlet(0.1, k);
        double total = 0;
        for (size_t j = 0; j < k; ++j) {
            REQUIRE(p[j] >= 0.0);
            total += p[j];
            mean[j] += p[j];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (size_t j = 0; j < k; ++j) CHECK(mean[j] / n == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("low-alpha dirichlet concentrates mass") {
    Rng rng(5);
    double max_sum_low = 0, max_sum_high = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        auto lo = rng.next_dirichlet(0.1, 5);
        auto hi = rng.next_dirichlet(100.0, 5);
        max_sum_low += *std::max_element(lo.begin(), lo.end());
        max_sum_high += *std::max_element(hi.begin(), hi.end());
    }
    CHECK(max_sum_low / n > 0.8);   // spiky
    CHECK(max_sum_high / n < 0.35); // near-uniform
}

TEST_CASE("shuffle is a seeded permutation") {
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> w = v;
    Rng a(6), b(6);
    a.shuffle(v);
    b.shuffle(w);
    CHECK(v == w);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}
