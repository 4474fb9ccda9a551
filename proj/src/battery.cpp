#include "bsphere/battery.hpp"

#include <algorithm>
#include <cmath>

#include "bsphere/errors.hpp"
#include "bsphere/parallel.hpp"
#include "bsphere/rng.hpp"
#include "bsphere/stats.hpp"

namespace bsphere {

bool StatReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::json to_json(const CheckResult& c) {
    nlohmann::json j = {{"name", c.name},
                        {"statistic", c.statistic},
                        {"threshold", c.threshold},
                        {"pass", c.pass}};
    if (c.p_value >= 0) j["p_value"] = c.p_value;
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

nlohmann::json to_json(const StatReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"version", kReportVersion}, {"meta", r.meta}, {"checks", checks}, {"all_pass", r.all_pass()}};
}

StatReport stats_battery(const StatsOptions& o) {
    if (o.num_runs < 100) throw ParameterError("stats_battery: need at least 100 runs");
    if (o.ball_runs < 1 || !(o.ball_lo > 0 && o.ball_lo < o.ball_hi))
        throw ParameterError("stats_battery: invalid ball-volume settings");
    StatReport report;
    report.meta = {{"num_runs", o.num_runs}, {"n", o.n},           {"ball_n", o.ball_n},
                   {"ball_runs", o.ball_runs}, {"ball_lo", o.ball_lo}, {"ball_hi", o.ball_hi},
                   {"level", o.level},       {"seed", o.seed}};

    const int runs = o.num_runs;
    std::vector<double> s_star(runs), eps(runs), d01(runs);
    parallel_for(runs, [&](std::size_t r) {
        auto h = sample_snake(o.n, sub_seed(o.seed, r));
        auto mk = marks(h);
        s_star[r] = static_cast<double>(mk.s_star) / h.n;
        eps[r] = mk.epsilon;
        // d(x0, x1) read off the metric row of x0 (time 0, the root of f).
        ChainRelaxation cr(h);
        d01[r] = cr.relax_from(0, 50, 1e-6).dist[mk.s_star];
    });

    auto ks = stats::ks_one_sample(s_star, [](double x) { return std::clamp(x, 0.0, 1.0); });
    report.checks.push_back({"s_star_uniform_ks", ks.statistic, ks.p_value, o.level, ks.p_value > o.level, ""});

    double mean_eps = stats::mean(eps);
    double bound = 3.0 / std::sqrt(static_cast<double>(runs));
    report.checks.push_back({"epsilon_rademacher_mean", std::abs(mean_eps), -1, bound,
                             std::abs(mean_eps) <= bound, ""});

    std::vector<double> plus, minus;
    for (int r = 0; r < runs; ++r) (eps[r] > 0 ? plus : minus).push_back(d01[r]);
    auto ind = stats::ks_two_sample(plus, minus);
    report.checks.push_back({"epsilon_independence_ks", ind.statistic, ind.p_value, o.level,
                             ind.p_value > o.level,
                             std::to_string(plus.size()) + " vs " + std::to_string(minus.size()) +
                                 " runs, functional d(x0,x1)"});

    // Ball volumes around x0 with the uniform measure on the grid.
    constexpr int kRadii = 10;
    std::vector<std::vector<double>> logvol(o.ball_runs, std::vector<double>(kRadii));
    std::vector<double> logr(kRadii);
    for (int k = 0; k < kRadii; ++k)
        logr[k] = std::log(o.ball_lo * std::pow(o.ball_hi / o.ball_lo, k / (kRadii - 1.0)));
    parallel_for(o.ball_runs, [&](std::size_t r) {
        auto h = sample_snake(o.ball_n, sub_seed(o.seed ^ 0xba11u, r));
        ChainRelaxation cr(h);
        auto row = cr.relax_from(0, 200, 1e-9).dist;
        const double ecc = *std::max_element(row.begin(), row.end());
        std::sort(row.begin(), row.end());
        for (int k = 0; k < kRadii; ++k) {
            double radius = std::exp(logr[k]) * ecc;
            auto inside = std::upper_bound(row.begin(), row.end(), radius) - row.begin();
            logvol[r][k] = std::log(static_cast<double>(inside) / row.size());
        }
    });
    std::vector<double> mean_logvol(kRadii, 0.0);
    for (const auto& v : logvol)
        for (int k = 0; k < kRadii; ++k) mean_logvol[k] += v[k] / o.ball_runs;
    double slope = stats::ols_slope(logr, mean_logvol);
    report.checks.push_back({"ball_volume_slope", slope, -1, 4.0, slope >= 3.5 && slope <= 4.5,
                             "accepted band [3.5, 4.5]"});
    return report;
}

SnakeResidual snake_residual(const ContourPair& ref, const ContourPair& rec) {
    if (rec.n < 1 || static_cast<int>(rec.f.size()) != rec.n + 1 || rec.g.size() != rec.f.size())
        throw ParameterError("snake_residual: malformed recovered snake");
    auto at = [&](const std::vector<double>& v, double u) {
        double x = u * rec.n;
        int a = std::min(static_cast<int>(x), rec.n - 1);
        double w = x - a;
        return v[a] * (1 - w) + v[a + 1] * w;
    };
    double max_f = 0, lo = ref.g[0], hi = ref.g[0], ef = 0, eg = 0;
    for (int k = 0; k <= ref.n; ++k) {
        max_f = std::max(max_f, ref.f[k]);
        lo = std::min(lo, ref.g[k]);
        hi = std::max(hi, ref.g[k]);
        double u = static_cast<double>(k) / ref.n;
        ef = std::max(ef, std::abs(at(rec.f, u) - ref.f[k]));
        eg = std::max(eg, std::abs(at(rec.g, u) - ref.g[k]));
    }
    return {max_f > 0 ? ef / max_f : ef, hi > lo ? eg / (hi - lo) : eg};
}

long long reflection_mismatches(const ContourPair& h, const std::vector<int>& sample,
                                const DistanceMatrix& d, const RelaxationOptions& relax) {
    auto r = reverse(h);
    std::vector<int> rsample;
    for (int p : sample) rsample.push_back((h.n - p) % h.n);
    std::sort(rsample.begin(), rsample.end());
    auto dr = sphere_matrix(r, rsample, relax);
    auto index = [&](int p) {
        return static_cast<int>(std::lower_bound(rsample.begin(), rsample.end(), (h.n - p) % h.n) -
                                rsample.begin());
    };
    long long mismatches = 0;
    for (int i = 0; i < d.m; ++i)
        for (int j = 0; j < d.m; ++j)
            mismatches += d(i, j) != dr(index(d.points[i]), index(d.points[j]));
    return mismatches;
}

nlohmann::json roundtrip_report(const ContourPair& h, const RoundtripOptions& o) {
    validate(h);
    nlohmann::json rep = {{"version", kReportVersion}, {"n", h.n}, {"m", o.m}, {"seed", h.seed}};
    auto sample = select_sample(h, o.m);
    SphereBuildInfo info;
    auto d = sphere_matrix(h, sample, o.relax, &info);
    rep["build"] = {{"rounds", info.rounds}, {"converged", info.converged}, {"last_change", info.last_change}};
    auto mk = marks(h);
    auto s = assemble_marked(h, d);
    rep["s_star"] = static_cast<double>(mk.s_star) / h.n;
    rep["epsilon"] = mk.epsilon;

    auto [glo, ghi] = std::minmax_element(h.g.begin(), h.g.end());
    const double range = *ghi - *glo;
    double root_res = 0, label_res = 0;
    auto labels = recover_labels(s);
    for (int i = 0; i < d.m; ++i) {
        root_res = std::max(root_res, std::abs(d(i, s.i1) - (h.g[d.points[i]] - *glo)));
        label_res = std::max(label_res, std::abs(labels[i] - h.g[d.points[i]]));
    }
    rep["root_distance_residual"] = root_res / range;
    rep["label_residual"] = label_res / range;
    double asym = 0;
    for (int i = 0; i < d.m; ++i)
        for (int j = 0; j < i; ++j) asym = std::max(asym, std::abs(d(i, j) - d(j, i)));
    rep["asymmetry"] = asym;
    if (o.reflection) rep["reflection_mismatches"] = reflection_mismatches(h, sample, d, o.relax);

    auto rh = reverse(h);
    for (int sign : {1, -1}) {
        auto sv = s;
        sv.epsilon = sign * mk.epsilon;
        SphereInverse inv(sv, o.inverse);
        auto rec = inv.phi();
        auto to_h = snake_residual(h, rec.h);
        auto to_r = snake_residual(rh, rec.h);
        std::vector<double> truth(d.m);
        for (int i = 0; i < d.m; ++i) truth[i] = static_cast<double>(d.points[i]) / h.n;
        nlohmann::json side = {
            {"s_star_hat", rec.s_star_hat},
            {"low_confidence_orientation", rec.low_confidence_orientation},
            {"residual_vs_h", {{"f", to_h.f}, {"g", to_h.g}}},
            {"residual_vs_reflection", {{"f", to_r.f}, {"g", to_r.g}}},
            {"time_kendall_tau", stats::kendall_tau(truth, rec.time_of)},
            {"loop_failures", rec.loop_failures},
            {"branch_failures", rec.branch_failures},
            {"max_nesting_violation", rec.max_nesting_violation}};
        if (o.rebuild && sign == 1) {
            // psi(phi(S)): a matrix from h_hat on the recovered times.
            std::vector<int> hat_sample(d.m);
            for (int i = 0; i < d.m; ++i)
                hat_sample[i] = std::min(rec.h.n - 1, static_cast<int>(std::lround(rec.time_of[i] * rec.h.n)));
            auto uniq = hat_sample;
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            auto dh = sphere_matrix(rec.h, uniq, o.relax);
            auto pos = [&](int t) {
                return static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), t) - uniq.begin());
            };
            double err = 0;
            for (int i = 0; i < d.m; ++i)
                for (int j = 0; j < d.m; ++j)
                    err = std::max(err, std::abs(dh(pos(hat_sample[i]), pos(hat_sample[j])) - d(i, j)));
            side["rebuild_relative_sup"] = err / d.diameter();
        }
        rep[sign == 1 ? "phi_correct_epsilon" : "phi_flipped_epsilon"] = side;
    }
    return rep;
}

}  // namespace bsphere
