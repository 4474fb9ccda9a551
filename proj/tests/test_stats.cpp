#include <gtest/gtest.h>

#include <cmath>

#include "bsphere/errors.hpp"
#include "bsphere/rng.hpp"
#include "bsphere/stats.hpp"

using namespace bsphere;

TEST(Stats, KolmogorovTailKnownValues) {
    EXPECT_NEAR(stats::kolmogorov_tail(1.358), 0.05, 5e-4);
    EXPECT_NEAR(stats::kolmogorov_tail(1.628), 0.01, 2e-4);
    EXPECT_EQ(stats::kolmogorov_tail(0.0), 1.0);
}

TEST(Stats, KsDetectsShift) {
    Rng rng = make_rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> a, b;
    for (int i = 0; i < 2000; ++i) {
        a.push_back(u(rng));
        b.push_back(u(rng) + 0.1);
    }
    auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    EXPECT_GT(stats::ks_one_sample(a, cdf).p_value, 0.01);
    EXPECT_LT(stats::ks_one_sample(b, cdf).p_value, 1e-6);
    EXPECT_LT(stats::ks_two_sample(a, b).p_value, 1e-6);
    EXPECT_THROW(stats::ks_two_sample({}, b), ParameterError);
}

TEST(Stats, ChiSquareAndMoments) {
    std::vector<double> obs = {10, 10, 10, 10}, exp = {10, 10, 10, 10};
    EXPECT_NEAR(stats::chi_square(obs, exp).p_value, 1.0, 1e-12);
    std::vector<double> v = {1, 2, 3, 4};
    EXPECT_DOUBLE_EQ(stats::mean(v), 2.5);
    EXPECT_DOUBLE_EQ(stats::variance(v), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(stats::median(v), 2.5);
    EXPECT_DOUBLE_EQ(stats::ols_slope(v, std::vector<double>{3, 5, 7, 9}), 2.0);
    EXPECT_DOUBLE_EQ(stats::kendall_tau(v, std::vector<double>{4, 3, 2, 1}), -1.0);
}
