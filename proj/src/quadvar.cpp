#include "bsphere/quadvar.hpp"

#include <algorithm>
#include <cmath>

#include "bsphere/errors.hpp"
#include "bsphere/stats.hpp"

namespace bsphere {

void validate(const TimeChangedPath& p) {
    if (p.values.size() != p.positions.size())
        throw ParameterError("time-changed path: values and positions differ in length");
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (!std::isfinite(p.values[i])) throw ParameterError("time-changed path: non-finite value");
        if (i > 0 && !(p.positions[i] > p.positions[i - 1]))
            throw ParameterError("time-changed path: positions must increase strictly");
    }
}

long long lattice_crossings(std::span<const double> values, double eps) {
    if (!(eps > 0)) throw ParameterError("lattice_crossings: eps must be positive");
    if (values.empty()) return 0;
    const double origin = values.front();
    long long level = 0, steps = 0;
    for (double v : values) {
        const double x = (v - origin) / eps;
        while (x >= static_cast<double>(level + 1)) {
            ++level;
            ++steps;
        }
        while (x <= static_cast<double>(level - 1)) {
            --level;
            ++steps;
        }
    }
    return steps;
}

long long lattice_crossings(const TimeChangedPath& p, double eps) {
    validate(p);
    return lattice_crossings(p.values, eps);
}

DurationEstimate duration(std::span<const double> values, std::span<const double> eps_schedule) {
    if (eps_schedule.empty()) throw ParameterError("duration: empty eps schedule");
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] > 0)) throw ParameterError("duration: eps must be positive");
        if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
            throw ParameterError("duration: eps schedule must decrease");
    }
    DurationEstimate out;
    std::vector<double> diffs;
    double squares = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        diffs.push_back(std::abs(values[i] - values[i - 1]));
        squares += diffs.back() * diffs.back();
    }
    out.eps_floor = 4.0 * stats::median(diffs);
    out.mesh_sigma = diffs.empty() ? 0.0 : std::sqrt(squares / diffs.size());
    // A discretely observed level is reached late by the mean overshoot of a
    // Gaussian walk, -zeta(1/2)/sqrt(2 pi) = 0.5826 sigma, so each lattice
    // step spans eps * (eps + 2 * 0.5826 sigma) of time.
    constexpr double kOvershoot = 0.5825971579390106;
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
        const double eps = eps_schedule[i];
        if (i > 0 && eps < out.eps_floor) break;
        long long c = lattice_crossings(values, eps);
        out.eps.push_back(eps);
        out.crossings.push_back(c);
        out.estimates.push_back(static_cast<double>(c) * eps * (eps + 2.0 * kOvershoot * out.mesh_sigma));
    }
    const std::size_t k = out.estimates.size();
    std::vector<double> tail(out.estimates.end() - std::min<std::size_t>(3, k), out.estimates.end());
    out.value = stats::median(tail);
    auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    out.unstable = out.value > 0 && (*hi - *lo) > 0.5 * out.value;
    return out;
}

DurationEstimate duration(const TimeChangedPath& p, std::span<const double> eps_schedule) {
    validate(p);
    return duration(p.values, eps_schedule);
}

std::vector<double> dyadic_schedule(double scale, int first, int last) {
    std::vector<double> eps;
    for (int k = first; k <= last; ++k) eps.push_back(std::ldexp(scale, -k));
    return eps;
}

}  // namespace bsphere
