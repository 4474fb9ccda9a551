#include "bsphere/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "bsphere/errors.hpp"

namespace bsphere::stats {

double kolmogorov_tail(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double stephens_p(double d, double effective_n) {
    const double rn = std::sqrt(effective_n);
    return kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
}

}  // namespace

TestResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw ParameterError("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size();) {
        // Treat runs of ties together so discrete laws are handled exactly.
        std::size_t j = i;
        while (j < sample.size() && sample[j] == sample[i]) ++j;
        double at = cdf(sample[i]);
        double below = cdf(std::nextafter(sample[i], -INFINITY));
        d = std::max({d, std::abs(at - j / n), std::abs(below - i / n)});
        i = j;
    }
    return {d, stephens_p(d, n)};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ParameterError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double x = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return {d, stephens_p(d, na * nb / (na + nb))};
}

TestResult chi_square(std::span<const double> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw ParameterError("chi_square: need matching bins, at least two");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
    }
    boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

double mean(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    double mu = mean(v), acc = 0.0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return acc / (v.size() - 1);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
    const std::size_t m = a.size();
    long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double da = a[i] - a[j], db = b[i] - b[j];
            if (da == 0 && db == 0) continue;
            if (da == 0) { ++ties_a; continue; }
            if (db == 0) { ++ties_b; continue; }
            (da * db > 0 ? concordant : discordant)++;
        }
    double n1 = static_cast<double>(concordant + discordant + ties_a);
    double n2 = static_cast<double>(concordant + discordant + ties_b);
    if (n1 == 0 || n2 == 0) return 0.0;
    return (concordant - discordant) / std::sqrt(n1 * n2);
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    double mx = mean(x), my = mean(y), sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace bsphere::stats
