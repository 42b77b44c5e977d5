#include <doctest.h>

#include <cmath>

#include "medhe/errors.hpp"
#include "medhe/stats.hpp"

using namespace medhe;

namespace {

// Independent oracle: two-sided p for dof=4 by Simpson integration of the
// closed-form density (3/8) * (1 + t^2/4)^(-5/2).
double p_two_sided_dof4(double t) {
    t = std::fabs(t);
    auto pdf = [](double x) { return 0.375 * std::pow(1.0 + x * x / 4.0, -2.5); };
    const int n = 20000;  // even
    const double h = t / n;
    double s = pdf(0.0) + pdf(t);
    for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * pdf(i * h);
    double cdf_half = s * h / 3.0;  // integral from 0 to t
    return 1.0 - 2.0 * cdf_half;
}

}  // namespace

TEST_CASE("identical series give p = 1 by the zero-difference convention") {
    std::vector<double> a{0.8, 0.9, 0.85, 0.95, 0.9};
    TTestResult r = paired_ttest(a, a);
    CHECK(r.p_value == 1.0);
    CHECK(r.t_stat == 0.0);
    CHECK_FALSE(r.degenerate_zero_variance);
}

TEST_CASE("constant nonzero differences give the infinite-t sentinel") {
    std::vector<double> a{2, 3, 4, 5, 6};
    std::vector<double> b{1, 2, 3, 4, 5};
    TTestResult r = paired_ttest(a, b);
    CHECK(r.degenerate_zero_variance);
    CHECK(std::isinf(r.t_stat));
    CHECK(r.p_value == 0.0);
}

TEST_CASE("p-value matches the numeric-integration oracle") {
    std::vector<double> diffs{0.1, -0.2, 0.05, 0.0, 0.15};
    std::vector<double> zero(diffs.size(), 0.0);
    TTestResult r = paired_ttest(diffs, zero);
    CHECK(r.dof == 4);
    // mean 0.02, sd 0.135093, t = 0.331042...
    CHECK(r.t_stat == doctest::Approx(0.33104).epsilon(1e-4));
    CHECK(r.p_value == doctest::Approx(p_two_sided_dof4(r.t_stat)).epsilon(1e-6));
}

TEST_CASE("student t p-values against reference points") {
    // Classic table values: t=2.776 at dof=4 is the 5% two-sided cut.
    CHECK(student_t_two_sided_p(2.776, 4) == doctest::Approx(0.05).epsilon(2e-3));
    CHECK(student_t_two_sided_p(0.0, 10) == doctest::Approx(1.0));
    CHECK(student_t_two_sided_p(12.706, 1) == doctest::Approx(0.05).epsilon(2e-3));
}

TEST_CASE("mismatched series are rejected") {
    CHECK_THROWS_AS(paired_ttest({1, 2}, {1}), ConfigError);
    CHECK_THROWS_AS(paired_ttest({1}, {1}), ConfigError);
}

TEST_CASE("helpers") {
    CHECK(mean_of({1, 2, 3}) == 2.0);
    CHECK(median_of({5, 1, 3}) == 3.0);
    CHECK(median_of({4, 1, 3, 2}) == 2.5);
    CHECK(stddev_of({2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(2.13809).epsilon(1e-5));
}
