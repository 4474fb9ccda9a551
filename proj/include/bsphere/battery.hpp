#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "bsphere/inverse.hpp"
#include "bsphere/mating.hpp"
#include "bsphere/snake.hpp"

namespace bsphere {

inline constexpr int kReportVersion = 1;

struct CheckResult {
    std::string name;
    double statistic = 0;
    double p_value = -1;  // -1 when the check is a residual, not a test
    double threshold = 0;
    bool pass = false;
    std::string detail;
};

struct StatReport {
    std::vector<CheckResult> checks;
    nlohmann::json meta;
    bool all_pass() const;
};

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const StatReport& r);

struct StatsOptions {
    int num_runs = 10000;
    int n = 1024;            // grid for the s*, epsilon and independence checks
    int ball_n = 16384;      // grid for the ball-volume regression
    int ball_runs = 50;
    double ball_lo = 0.05;   // radii as fractions of the eccentricity of x0
    double ball_hi = 0.5;
    double level = 0.01;
    std::uint64_t seed = 1;
};

// (a) KS of s*/n against Uniform[0,1]; (b) |mean epsilon| <= 3/sqrt(N);
// (c) two-sample KS of d(x0,x1) given epsilon = +1 vs -1; (d) OLS slope of
// the run-averaged log mu(B_r(x0)) against log r over [lo, hi] times the
// eccentricity of x0, in [3.5, 4.5].
StatReport stats_battery(const StatsOptions& options);

// Grid-wise sup residuals of a recovered snake against a reference, with
// the recovered functions linearly interpolated at the reference grid.
struct SnakeResidual {
    double f = 0;         // sup |f_hat - f| / max f
    double g = 0;         // sup |g_hat - g| / (max g - min g)
};
SnakeResidual snake_residual(const ContourPair& reference, const ContourPair& recovered);

// Entries of sphere_matrix(h, sample) differing from sphere_matrix(R(h),
// reversed sample) at the reversed indices; exact comparison.
long long reflection_mismatches(const ContourPair& h, const std::vector<int>& sample,
                                const DistanceMatrix& d, const RelaxationOptions& relax = {});

struct RoundtripOptions {
    int m = 4000;
    RelaxationOptions relax;
    InverseParams inverse;
    bool rebuild = true;      // rebuild a matrix from h_hat and compare
    bool reflection = true;   // rebuild from R(h) and compare entrywise
};

// Every residual of the pipeline h -> sphere -> phi on one snake.
nlohmann::json roundtrip_report(const ContourPair& h, const RoundtripOptions& options);

}  // namespace bsphere
