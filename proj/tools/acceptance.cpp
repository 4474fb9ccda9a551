// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. --only 3,5 restricts the run; --report writes JSON.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsphere/battery.hpp"
#include "bsphere/cvs.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/inverse.hpp"
#include "bsphere/io.hpp"
#include "bsphere/mating.hpp"
#include "bsphere/quadvar.hpp"
#include "bsphere/rng.hpp"
#include "bsphere/rtree.hpp"
#include "bsphere/snake.hpp"
#include "bsphere/stats.hpp"

using namespace bsphere;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
    json data;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Tree distance on the circle by direct scans (independent of TreeView).
double scan_tree_dist(const std::vector<double>& v, int s, int t) {
    int a = std::min(s, t), b = std::max(s, t);
    double inner = *std::min_element(v.begin() + a, v.begin() + b + 1);
    double outer = std::min(*std::min_element(v.begin(), v.begin() + a + 1),
                            *std::min_element(v.begin() + b, v.end()));
    return v[s] + v[t] - 2 * std::max(inner, outer);
}

// Masses of the components of the tree coded by v minus the class of s.
// Walking once around the circle from s, a time t is glued to s when
// v[t] = v[s] and either the forward or the backward arc stays >= v[s].
std::vector<double> scan_side_masses(const std::vector<double>& v, int s) {
    const int n = static_cast<int>(v.size()) - 1;
    std::vector<char> glued(n, 0);
    glued[s] = 1;
    double run = v[s];
    for (int k = 1; k < n; ++k) {
        int t = (s + k) % n;
        run = std::min(run, v[t]);
        if (v[t] == v[s] && run >= v[s]) glued[t] = 1;
    }
    run = v[s];
    for (int k = 1; k < n; ++k) {
        int t = (s - k + n) % n;
        run = std::min(run, v[t]);
        if (v[t] == v[s] && run >= v[s]) glued[t] = 1;
    }
    std::vector<double> out;
    int len = 0;
    for (int k = 1; k <= n; ++k) {
        if (glued[(s + k) % n]) {
            if (len > 0) out.push_back(static_cast<double>(len) / n);
            len = 0;
        } else {
            ++len;
        }
    }
    return out;
}

bool skeleton_oracle(const std::vector<double>& f, int s, double min_mass) {
    auto masses = scan_side_masses(f, s);
    return std::count_if(masses.begin(), masses.end(), [&](double x) { return x >= min_mass; }) >= 2;
}

struct Sphere {
    ContourPair h;
    std::vector<int> sample;
    MarkedSphereSample s;
};

Sphere build(int n, int m, std::uint64_t seed) {
    Sphere out;
    out.h = sample_snake(n, seed);
    out.sample = select_sample(out.h, m);
    out.s = assemble_marked(out.h, sphere_matrix(out.h, out.sample));
    return out;
}

Outcome criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    long long trees = 0, tree_fail = 0, maps = 0, map_fail = 0;
    for (int n = 1; n <= 4; ++n)
        for (const auto& t : cvs::enumerate_trees(n))
            for (int sign : {1, -1}) {
                ++trees;
                auto r = cvs::cvs_inverse(cvs::cvs_forward(t, sign));
                tree_fail += !(r.tree == t && r.sign == sign);
            }
    for (int n = 1; n <= 3; ++n)
        for (const auto& q : cvs::enumerate_quadrangulations(n)) {
            ++maps;
            auto r = cvs::cvs_inverse(q);
            map_fail += cvs::canonical_code(cvs::cvs_forward(r.tree, r.sign)) != cvs::canonical_code(q);
        }
    double secs = seconds_since(t0);
    return {tree_fail == 0 && map_fail == 0 && secs < 60,
            fmt("%lld tree cases, %lld failures; %lld map cases, %lld failures; %.1fs", trees, tree_fail,
                maps, map_fail, secs),
            {{"tree_cases", trees}, {"tree_failures", tree_fail}, {"map_cases", maps},
             {"map_failures", map_fail}, {"seconds", secs}}};
}

Outcome criterion2() {
    bool ok = true;
    std::string text;
    json rows = json::array();
    for (int n = 1; n <= 4; ++n) {
        // 3^n Catalan(n) from the ballot recursion, independent of the library.
        std::vector<std::uint64_t> cat(n + 1, 0);
        cat[0] = 1;
        for (int k = 1; k <= n; ++k)
            for (int j = 0; j < k; ++j) cat[k] += cat[j] * cat[k - 1 - j];
        std::uint64_t expect = cat[n];
        for (int k = 0; k < n; ++k) expect *= 3;
        auto trees = cvs::enumerate_trees(n).size();
        auto maps = cvs::enumerate_quadrangulations(n).size();
        ok = ok && trees == expect && maps == 2 * expect;
        text += fmt("n=%d: %zu/%llu trees, %zu/%llu maps; ", n, trees, (unsigned long long)expect, maps,
                    (unsigned long long)(2 * expect));
        rows.push_back({{"n", n}, {"trees", trees}, {"maps", maps}, {"expected_trees", expect}});
    }
    return {ok, text, rows};
}

struct SmallBatch {
    std::vector<Sphere> spheres;
    double seconds = 0;
};

SmallBatch& small_batch() {
    static SmallBatch batch = [] {
        SmallBatch b;
        auto t0 = std::chrono::steady_clock::now();
        for (int seed = 0; seed < 100; ++seed) b.spheres.push_back(build(4096, 500, 3000 + seed));
        b.seconds = seconds_since(t0);
        return b;
    }();
    return batch;
}

Outcome criterion3() {
    auto t0 = std::chrono::steady_clock::now();
    auto& batch = small_batch();
    double asym = 0, tri = 0, above_dg = 0, glued = 0;
    for (const auto& sp : batch.spheres) {
        const auto& d = sp.s.dist;
        const int m = d.m;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                asym = std::max(asym, std::abs(d(i, j) - d(j, i)));
                int s = d.points[i], t = d.points[j];
                above_dg = std::max(above_dg, d(i, j) - scan_tree_dist(sp.h.g, s, t));
                if (scan_tree_dist(sp.h.f, s, t) <= 0) glued = std::max(glued, d(i, j));
            }
        tri = std::max(tri, d.max_triangle_violation());
    }
    double secs = seconds_since(t0);
    bool ok = asym == 0 && tri <= 1e-9 && above_dg <= 1e-12 && glued == 0 && secs < 600;
    return {ok,
            fmt("asymmetry %.3g, triangle violation %.3g, max(d - d_g) %.3g, max d on glued pairs %.3g; %.0fs",
                asym, tri, above_dg, glued, secs),
            {{"asymmetry", asym}, {"triangle", tri}, {"above_dg", above_dg}, {"glued", glued}, {"seconds", secs}}};
}

Outcome criterion4() {
    double worst = 0;
    for (const auto& sp : small_batch().spheres) {
        const auto& d = sp.s.dist;
        const auto& g = sp.h.g;
        auto [lo, hi] = std::minmax_element(g.begin(), g.end());
        int s_star = static_cast<int>(lo - g.begin());
        // The distance to x1 is read from the row of the sample point at s*.
        int at = -1;
        for (int i = 0; i < d.m; ++i)
            if (d.points[i] == s_star) at = i;
        for (int i = 0; i < d.m; ++i)
            worst = std::max(worst, std::abs(d(i, at) - (g[d.points[i]] - *lo)) / (*hi - *lo));
    }
    return {worst <= 1e-3, fmt("max relative residual %.3g over 100 spheres", worst), {{"residual", worst}}};
}

Outcome criterion5() {
    long long mismatches = 0;
    for (const auto& sp : small_batch().spheres)
        mismatches += reflection_mismatches(sp.h, sp.sample, sp.s.dist);
    return {mismatches == 0, fmt("%lld mismatching entries over 100 spheres", mismatches),
            {{"mismatches", mismatches}}};
}

Outcome criterion6() {
    double worst = 0;
    for (const auto& sp : small_batch().spheres) {
        auto l = recover_labels(sp.s);
        auto [lo, hi] = std::minmax_element(sp.h.g.begin(), sp.h.g.end());
        for (int i = 0; i < sp.s.dist.m; ++i)
            worst = std::max(worst, std::abs(l[i] - sp.h.g[sp.s.dist.points[i]]) / (*hi - *lo));
    }
    return {worst <= 1e-3, fmt("max relative label error %.3g over 100 spheres", worst), {{"residual", worst}}};
}

struct MidBatch {
    std::vector<Sphere> spheres;
    std::vector<std::unique_ptr<SphereInverse>> inv;
};

MidBatch& mid_batch() {
    static MidBatch batch = [] {
        MidBatch b;
        for (int seed = 0; seed < 50; ++seed) {
            b.spheres.push_back(build(4096, 2000, 5000 + seed));
            b.inv.push_back(std::make_unique<SphereInverse>(b.spheres.back().s));
        }
        return b;
    }();
    return batch;
}

Outcome criterion7() {
    auto& b = mid_batch();
    int pass = 0, total = 0, skipped = 0;
    for (int k = 0; k < 20; ++k) {
        const auto& sp = b.spheres[k];
        const auto& inv = *b.inv[k];
        const auto& d = sp.s.dist;
        const auto& c = inv.classification();
        const auto& l = inv.labels();
        std::vector<int> plain;
        for (int i = 0; i < d.m; ++i)
            if (c.in_plain[i] && i != sp.s.i1) plain.push_back(i);
        auto rng = make_rng(7000 + k);
        const double diam = d.diameter();
        const double n = sp.h.n;
        std::vector<double> g = sp.h.g;
        int done = 0;
        for (int attempt = 0; done < 100 && attempt < 1000; ++attempt) {
            int x = plain[rng() % plain.size()], y = plain[rng() % plain.size()];
            std::vector<int> cx, cy;
            try {
                cx = inv.extract_geodesic(x, sp.s.i1, inv.params().tol_geo);
                cy = inv.extract_geodesic(y, sp.s.i1, inv.params().tol_geo);
            } catch (const SamplingError&) {
                ++skipped;
                continue;
            }
            ++done;
            // Merge point: the highest-label point common to both chains.
            std::set<int> on_y(cy.begin(), cy.end());
            int z = sp.s.i1;
            for (int a : cx)
                if (on_y.count(a) && l[a] > l[z]) z = a;
            double oracle = scan_tree_dist(g, d.points[x] % static_cast<int>(n), d.points[y] % static_cast<int>(n));
            pass += std::abs(oracle - (d(x, z) + d(y, z))) <= 0.02 * diam;
            ++total;
        }
    }
    double rate = total ? static_cast<double>(pass) / total : 0;
    return {rate >= 0.95, fmt("%d/%d pairs within 0.02 diameter (rate %.3f), %d sparse chains skipped", pass, total, rate, skipped),
            {{"pass", pass}, {"total", total}, {"rate", rate}, {"skipped", skipped}}};
}

Outcome criterion8() {
    auto& b = mid_batch();
    double acc_sum = 0, rec_sum = 0, spec_sum = 0;
    json per = json::array();
    for (int k = 0; k < 20; ++k) {
        const auto& sp = b.spheres[k];
        const auto& c = b.inv[k]->classification();
        int tp = 0, fn = 0, tn = 0, fp = 0;
        for (int i = 0; i < sp.s.dist.m; ++i) {
            bool truth = skeleton_oracle(sp.h.f, sp.s.dist.points[i] % sp.h.n, 0.05);
            bool flag = c.in_cut[i];
            (truth ? (flag ? tp : fn) : (flag ? fp : tn))++;
        }
        double rec = tp + fn ? static_cast<double>(tp) / (tp + fn) : 1.0;
        double tnr = tn + fp ? static_cast<double>(tn) / (tn + fp) : 1.0;
        rec_sum += rec;
        spec_sum += tnr;
        acc_sum += (rec + tnr) / 2;
        per.push_back({{"recall", rec}, {"specificity", tnr}, {"positives", tp + fn}});
    }
    double acc = acc_sum / 20;
    return {acc >= 0.9,
            fmt("balanced agreement %.3f (recall %.3f, specificity %.3f) over 20 spheres", acc, rec_sum / 20,
                spec_sum / 20),
            {{"balanced_agreement", acc}, {"per_sphere", per}}};
}

Outcome criterion9() {
    auto& b = mid_batch();
    int good = 0, flip_good = 0, failed = 0;
    json per = json::array();
    for (std::size_t k = 0; k < b.spheres.size(); ++k) {
        const auto& sp = b.spheres[k];
        double truth = static_cast<double>(marks(sp.h).s_star) / sp.h.n;
        double hat, flipped;
        try {
            hat = b.inv[k]->recover_orientation_time();
            flipped = b.inv[k]->with_epsilon(-*sp.s.epsilon).recover_orientation_time();
        } catch (const SamplingError&) {
            ++failed;
            per.push_back({{"s_star", truth}, {"failed", true}});
            continue;
        }
        good += std::abs(hat - truth) <= 0.05;
        flip_good += std::abs(flipped - (1 - hat)) <= 0.05;
        per.push_back({{"s_star", truth}, {"s_star_hat", hat}, {"flipped", flipped}});
    }
    const int n = static_cast<int>(b.spheres.size());
    bool ok = good >= 0.9 * n && flip_good == n;
    return {ok, fmt("%d/%d within 0.05, %d/%d flips complementary, %d loop failures", good, n, flip_good, n, failed),
            {{"within", good}, {"flip_within", flip_good}, {"failed", failed}, {"per_sphere", per}}};
}

Outcome criterion10() {
    const int steps = 1 << 16;
    json rows = json::array();
    bool ok = true;
    std::string text;
    for (double T : {0.3, 0.7, 1.0}) {
        int good = 0;
        for (int seed = 0; seed < 200; ++seed) {
            auto rng = make_rng(9000 + seed, static_cast<std::uint64_t>(T * 10));
            std::normal_distribution<double> normal(0.0, std::sqrt(T / steps));
            std::vector<double> v(steps + 1, 0.0);
            for (int i = 1; i <= steps; ++i) v[i] = v[i - 1] + normal(rng);
            auto est = duration(v, dyadic_schedule(std::sqrt(stats::variance(v)), 3, 6));
            good += std::abs(est.value - T) <= 0.1 * T;
        }
        ok = ok && good >= 190;
        text += fmt("T=%.1f: %d/200; ", T, good);
        rows.push_back({{"T", T}, {"within", good}});
    }
    // Reparametrization: a warped increasing position sequence changes nothing.
    auto rng = make_rng(9999);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.7 / steps));
    TimeChangedPath a, w;
    double x = 0;
    for (int i = 0; i <= steps; ++i) {
        if (i) x += normal(rng);
        double u = static_cast<double>(i) / steps;
        a.values.push_back(x);
        w.values.push_back(x);
        a.positions.push_back(u);
        w.positions.push_back(std::exp(3 * u) + u);
    }
    auto sched = dyadic_schedule(0.5, 3, 6);
    bool invariant = duration(a, sched).value == duration(w, sched).value;
    ok = ok && invariant;
    text += invariant ? "reparametrization exact" : "reparametrization differs";
    return {ok, text, {{"rows", rows}, {"reparametrization_exact", invariant}}};
}

Outcome criterion11() {
    int pass = 0, match_h = 0, match_r = 0, failed = 0;
    json per = json::array();
    auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < 20; ++k) {
        auto sp = build(16384, 4000, 11000 + k);
        const auto& h = sp.h;
        auto rh = reverse(h);
        SphereInverse inv(sp.s);
        RecoveredSnake right, wrong;
        try {
            right = inv.phi();
            wrong = inv.with_epsilon(-*sp.s.epsilon).phi();
        } catch (const SamplingError& e) {
            ++failed;
            per.push_back({{"error", e.what()}});
            continue;
        }
        auto within = [](const SnakeResidual& r) { return r.f <= 0.2 && r.g <= 0.1; };
        auto a_h = snake_residual(h, right.h), a_r = snake_residual(rh, right.h);
        auto b_h = snake_residual(h, wrong.h), b_r = snake_residual(rh, wrong.h);
        bool ok_right = within(a_h), ok_wrong = within(b_r);
        match_h += ok_right;
        match_r += ok_wrong;
        pass += ok_right && ok_wrong;
        per.push_back({{"correct_eps_vs_h", {a_h.f, a_h.g}},
                       {"correct_eps_vs_reflection", {a_r.f, a_r.g}},
                       {"flipped_eps_vs_h", {b_h.f, b_h.g}},
                       {"flipped_eps_vs_reflection", {b_r.f, b_r.g}}});
    }
    double secs = seconds_since(t0);
    return {pass >= 16,
            fmt("%d/20 seeds pass (correct eps matches h: %d, flipped eps matches R(h): %d, loop failures: %d); %.0fs",
                pass, match_h, match_r, failed, secs),
            {{"pass", pass}, {"failed", failed}, {"per_seed", per}, {"seconds", secs}}};
}

Outcome criterion12() {
    StatsOptions o;
    o.num_runs = 10000;
    o.n = 1024;
    o.ball_n = 16384;
    o.ball_runs = 50;
    o.seed = 12000;
    auto rep = stats_battery(o);
    std::string text;
    for (const auto& c : rep.checks)
        text += fmt("%s %.4g%s [%s]; ", c.name.c_str(), c.statistic,
                    c.p_value >= 0 ? fmt(" (p=%.3g)", c.p_value).c_str() : "", c.pass ? "ok" : "fail");
    return {rep.all_pass(), text, to_json(rep)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    std::string report;
    app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
    app.add_option("--report", report, "Write a JSON report");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"exact discrete round-trip", criterion1},
        {"counting", criterion2},
        {"pseudometric suite", criterion3},
        {"root-distance identity", criterion4},
        {"reflection", criterion5},
        {"label recovery", criterion6},
        {"merge-point distance identity", criterion7},
        {"cut-locus classification", criterion8},
        {"orientation / s* recovery", criterion9},
        {"quadratic-variation duration", criterion10},
        {"end-to-end inverse", criterion11},
        {"statistical battery", criterion12},
    };
    json out = {{"version", kReportVersion}, {"criteria", json::array()}};
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        int id = static_cast<int>(k) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what(), {}};
        }
        failures += !o.pass;
        std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    o.summary.c_str(), seconds_since(t0));
        std::fflush(stdout);
        out["criteria"].push_back({{"id", id}, {"name", criteria[k].first}, {"pass", o.pass},
                                   {"summary", o.summary}, {"data", o.data}});
    }
    if (!report.empty()) io::write_json(report, out);
    return failures ? 1 : 0;
}
