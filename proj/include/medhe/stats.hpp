#pragma once

#include <vector>

namespace medhe {

struct TTestResult {
    double t_stat = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool degenerate_zero_variance = false;  ///< all differences equal but nonzero: t = inf
};

/// Paired two-sided t-test. All-zero differences give p = 1 by convention;
/// zero variance with nonzero mean gives the infinite-t sentinel and p = 0.
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

/// Two-sided p-value for Student's t with dof degrees of freedom.
double student_t_two_sided_p(double t, int dof);

double mean_of(const std::vector<double>& v);
double stddev_of(const std::vector<double>& v);  ///< sample (n-1) stddev
double median_of(std::vector<double> v);

}  // namespace medhe
