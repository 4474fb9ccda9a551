#pragma once

#include <span>
#include <vector>

namespace bsphere {

// Observed values of a time-changed path B(kappa(u)) at increasing
// positions u. Only the order of the values matters to the estimator.
struct TimeChangedPath {
    std::vector<double> values;
    std::vector<double> positions;
};

void validate(const TimeChangedPath& p);

// Steps of the skeleton walk of the values on the lattice v0 + eps Z,
// v0 = values.front(). Linear interpolation between samples, so a jump over
// several levels counts every level passed.
long long lattice_crossings(std::span<const double> values, double eps);
long long lattice_crossings(const TimeChangedPath& p, double eps);

struct DurationEstimate {
    double value = 0;
    bool unstable = false;
    double eps_floor = 0;              // 4 * median |successive difference|
    double mesh_sigma = 0;             // root mean square successive difference
    std::vector<double> eps;           // schedule entries actually used
    std::vector<long long> crossings;  // per used eps
    std::vector<double> estimates;     // crossings * eps * (eps + 1.165 mesh_sigma)
};

// kappa(1) from crossings(eps) * eps^2, corrected for the overshoot of the
// sampled path past each level, over a decreasing schedule: entries
// below the mesh floor are dropped (the largest entry is always kept), the
// estimate is the median of the last three surviving values.
DurationEstimate duration(std::span<const double> values, std::span<const double> eps_schedule);
DurationEstimate duration(const TimeChangedPath& p, std::span<const double> eps_schedule);

// eps = scale * 2^-k for k = first..last.
std::vector<double> dyadic_schedule(double scale, int first, int last);

}  // namespace bsphere
