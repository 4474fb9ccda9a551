#include <gtest/gtest.h>

#include <cmath>

#include "bsphere/errors.hpp"
#include "bsphere/quadvar.hpp"
#include "bsphere/rng.hpp"
#include "bsphere/stats.hpp"

using namespace bsphere;

namespace {

std::vector<double> brownian(double duration, int steps, std::uint64_t seed) {
    Rng rng = make_rng(seed, 3);
    std::normal_distribution<double> normal(0.0, std::sqrt(duration / steps));
    std::vector<double> v(steps + 1, 0.0);
    for (int i = 1; i <= steps; ++i) v[i] = v[i - 1] + normal(rng);
    return v;
}

std::vector<double> schedule_for(const std::vector<double>& v) {
    return dyadic_schedule(std::sqrt(stats::variance(v)), 3, 6);
}

}  // namespace

TEST(Crossings, Examples) {
    EXPECT_EQ(lattice_crossings(std::vector<double>(10, 2.5), 0.1), 0);
    EXPECT_EQ(lattice_crossings(std::vector<double>{0.0, 1.0}, 0.25), 4);
    std::vector<double> ramp(1001);
    for (int i = 0; i <= 1000; ++i) ramp[i] = 1.7 * i / 1000.0;
    EXPECT_EQ(lattice_crossings(ramp, 0.1), 17);
    EXPECT_EQ(lattice_crossings(ramp, 0.3), 5);
    EXPECT_THROW(lattice_crossings(ramp, 0.0), ParameterError);
}

TEST(Crossings, BackAndForthCountsEveryStep) {
    // 0 -> 1 -> 0 -> 1 with eps 0.5: two steps per monotone stretch.
    EXPECT_EQ(lattice_crossings(std::vector<double>{0, 1, 0, 1}, 0.5), 6);
    // Wiggles inside one cell never count.
    EXPECT_EQ(lattice_crossings(std::vector<double>{0, 0.4, -0.4, 0.3}, 0.5), 0);
}

TEST(Duration, ConstantAndSmoothPaths) {
    auto schedule = dyadic_schedule(1.0, 1, 8);
    auto flat = duration(std::vector<double>(100, 3.0), schedule);
    EXPECT_EQ(flat.value, 0.0);
    std::vector<double> line(10001);
    for (int i = 0; i <= 10000; ++i) line[i] = i / 10000.0;
    auto est = duration(line, schedule);
    ASSERT_GE(est.estimates.size(), 3u);
    for (std::size_t i = 0; i < est.eps.size(); ++i) EXPECT_NEAR(est.estimates[i], est.eps[i], 2e-4);
    EXPECT_LT(est.value, 0.02);
}

TEST(Duration, BrownianDurationsWithinTenPercent) {
    for (double T : {0.3, 0.7, 1.0}) {
        int good = 0;
        for (int seed = 0; seed < 200; ++seed) {
            auto v = brownian(T, 1 << 16, seed);
            auto est = duration(v, schedule_for(v));
            good += std::abs(est.value - T) <= 0.1 * T;
        }
        EXPECT_GE(good, 190) << "T=" << T;
    }
}

TEST(Duration, ReparametrizationInvariance) {
    auto v = brownian(0.7, 1 << 14, 5);
    TimeChangedPath uniform{v, {}}, warped{v, {}};
    for (std::size_t i = 0; i < v.size(); ++i) {
        double u = static_cast<double>(i) / (v.size() - 1);
        uniform.positions.push_back(u);
        warped.positions.push_back(std::pow(u, 3.0) + 0.1 * u);
    }
    auto schedule = schedule_for(v);
    EXPECT_EQ(duration(uniform, schedule).value, duration(warped, schedule).value);
    EXPECT_EQ(lattice_crossings(uniform, 0.01), lattice_crossings(warped, 0.01));
    warped.positions[10] = warped.positions[9];
    EXPECT_THROW(duration(warped, schedule), ParameterError);
}

TEST(Duration, ScalingIdentity) {
    auto v = brownian(1.0, 1 << 14, 6);
    auto schedule = schedule_for(v);
    std::vector<double> scaled(v), scaled_eps(schedule);
    const double c = 4.0;  // a power of two keeps the arithmetic exact
    for (double& x : scaled) x *= c;
    for (double& e : scaled_eps) e *= c;
    EXPECT_DOUBLE_EQ(duration(scaled, scaled_eps).value, c * c * duration(v, schedule).value);
}

TEST(Duration, Additivity) {
    std::vector<double> errors;
    for (int seed = 0; seed < 40; ++seed) {
        auto a = brownian(0.3, 1 << 15, 100 + seed);
        auto b = brownian(0.5, 1 << 15, 200 + seed);
        std::vector<double> joined(a);
        for (std::size_t i = 1; i < b.size(); ++i) joined.push_back(a.back() + b[i]);
        errors.push_back(duration(joined, schedule_for(joined)).value - 0.8);
    }
    double m = stats::mean(errors), se = std::sqrt(stats::variance(errors) / errors.size());
    EXPECT_LE(std::abs(m), 2.5 * se + 0.02);
}

TEST(Duration, ScheduleValidation) {
    std::vector<double> v = {0, 1, 2};
    EXPECT_THROW(duration(v, std::vector<double>{}), ParameterError);
    EXPECT_THROW(duration(v, std::vector<double>{0.1, 0.2}), ParameterError);
    EXPECT_THROW(duration(v, std::vector<double>{0.1, -0.2}), ParameterError);
}

TEST(Duration, FloorDropsMeshScaleEntries) {
    auto v = brownian(1.0, 1 << 10, 2);
    auto est = duration(v, dyadic_schedule(1.0, 0, 20));
    EXPECT_GT(est.eps_floor, 0.0);
    EXPECT_EQ(est.eps.front(), 1.0);
    for (std::size_t i = 1; i < est.eps.size(); ++i) EXPECT_GE(est.eps[i], est.eps_floor);
}
