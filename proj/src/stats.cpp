#include "medhe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medhe/errors.hpp"

namespace medhe {

namespace {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-15;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, int dof) {
    if (dof < 1) throw ContractViolation("student_t_two_sided_p: dof must be >= 1");
    if (std::isinf(t)) return 0.0;
    double nu = static_cast<double>(dof);
    double x = nu / (nu + t * t);
    return reg_incomplete_beta(0.5 * nu, 0.5, x);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw ContractViolation("mean_of: empty vector");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    if (v.empty()) throw ContractViolation("median_of: empty vector");
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ConfigError("paired_ttest: series lengths differ");
    if (a.size() < 2) throw ConfigError("paired_ttest: need at least 2 pairs");

    std::vector<double> diff(a.size());
    for (size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];

    TTestResult res;
    res.dof = static_cast<int>(a.size()) - 1;
    double m = mean_of(diff);
    double sd = stddev_of(diff);

    if (sd == 0.0) {
        if (m == 0.0) {
            res.t_stat = 0.0;
            res.p_value = 1.0;  // identical series
        } else {
            res.t_stat = m > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
            res.degenerate_zero_variance = true;
        }
        return res;
    }

    res.t_stat = m / (sd / std::sqrt(static_cast<double>(a.size())));
    res.p_value = student_t_two_sided_p(res.t_stat, res.dof);
    return res;
}

}  // namespace medhe
