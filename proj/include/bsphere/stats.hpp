#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bsphere::stats {

// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);

struct TestResult {
    double statistic = 0;
    double p_value = 1;
};

// One-sample KS against a CDF. For a discrete reference law the p-value is
// conservative.
TestResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Pearson chi-square goodness of fit against expected counts.
TestResult chi_square(std::span<const double> observed, std::span<const double> expected);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // unbiased
double median(std::vector<double> v);

// Kendall tau-b rank correlation, O(m^2).
double kendall_tau(std::span<const double> a, std::span<const double> b);

// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace bsphere::stats
