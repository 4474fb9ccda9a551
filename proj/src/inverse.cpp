#include "bsphere/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bsphere/errors.hpp"
#include "bsphere/parallel.hpp"
#include "bsphere/quadvar.hpp"

namespace bsphere {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sample(const MarkedSphereSample& s) {
    const int m = s.dist.m;
    if (m < 20) throw ParameterError("inverse: need at least 20 sample points, got " + std::to_string(m));
    if (s.dist.values.size() != static_cast<std::size_t>(m) * m)
        throw ParameterError("inverse: distance matrix size mismatch");
    if (s.i0 < 0 || s.i0 >= m || s.i1 < 0 || s.i1 >= m)
        throw ParameterError("inverse: marked point out of range");
    if (s.i0 == s.i1) throw ParameterError("inverse: i0 and i1 coincide");
    if (static_cast<int>(s.mass.size()) != m) throw ParameterError("inverse: mass size mismatch");
    double total = 0;
    for (double w : s.mass) {
        if (!(w >= 0) || !std::isfinite(w)) throw ParameterError("inverse: invalid mass entry");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-6) throw ParameterError("inverse: masses must sum to 1");
    for (double v : s.dist.values)
        if (!std::isfinite(v) || v < 0) throw ParameterError("inverse: invalid distance entry");
    if (s.epsilon && *s.epsilon != 1 && *s.epsilon != -1)
        throw ParameterError("inverse: epsilon must be +1 or -1");
}

// Smallest r such that the graph {d < r} (closed at r) is connected: the
// longest edge of a minimum spanning tree.
double connectivity_length(const DistanceMatrix& d) {
    const int m = d.m;
    std::vector<double> best(m, kInf);
    std::vector<char> done(m, 0);
    best[0] = 0;
    double longest = 0;
    for (int it = 0; it < m; ++it) {
        int u = -1;
        for (int v = 0; v < m; ++v)
            if (!done[v] && (u < 0 || best[v] < best[u])) u = v;
        done[u] = 1;
        longest = std::max(longest, best[u]);
        for (int v = 0; v < m; ++v)
            if (!done[v]) best[v] = std::min(best[v], d(u, v));
    }
    return longest;
}

std::vector<int> components(const std::vector<std::vector<int>>& adj,
                            const std::vector<char>& alive,
                            const std::vector<double>* reach, double d_slack,
                            const DistanceMatrix* d) {
    const int m = static_cast<int>(adj.size());
    std::vector<int> comp(m, -1);
    std::vector<int> stack;
    int next = 0;
    for (int root = 0; root < m; ++root) {
        if (!alive[root] || comp[root] >= 0) continue;
        comp[root] = next;
        stack.push_back(root);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u]) {
                if (!alive[v] || comp[v] >= 0) continue;
                // An edge whose endpoints are jointly close to the loop may
                // pass through it.
                if (reach && (*reach)[u] + (*reach)[v] <= (*d)(u, v) + d_slack) continue;
                comp[v] = next;
                stack.push_back(v);
            }
        }
        ++next;
    }
    return comp;
}

}  // namespace

InverseParams resolve_params(const MarkedSphereSample& s, InverseParams p) {
    check_sample(s);
    const auto& d = s.dist;
    const int m = d.m;
    if (!(p.cover_quantile > 0 && p.cover_quantile <= 1))
        throw ParameterError("inverse: cover_quantile must lie in (0, 1]");
    std::vector<double> nearest(m, kInf);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (j != i) nearest[i] = std::min(nearest[i], d(i, j));
    std::sort(nearest.begin(), nearest.end());
    const double r_cov = nearest[static_cast<int>(std::ceil(p.cover_quantile * m)) - 1];
    p.r_cov = r_cov;
    if (p.tol_geo < 0) p.tol_geo = 1e-9 * d.diameter();
    if (p.sep_radius < 0) p.sep_radius = 5 * r_cov;
    if (p.eta < 0) p.eta = 2 * r_cov;
    if (p.eps_graph < 0) p.eps_graph = std::max(3 * r_cov, 1.05 * connectivity_length(d));
    if (!(p.macro_mass > 0 && p.macro_mass < 0.5))
        throw ParameterError("inverse: macro_mass must lie in (0, 0.5)");
    if (p.eps_graph <= 0) throw ParameterError("inverse: degenerate sample (all distances zero)");
    return p;
}

SphereInverse::SphereInverse(const MarkedSphereSample& s, InverseParams p)
    : s_(s), p_(resolve_params(s, p)), m_(s.dist.m) {
    const auto& d = s_.dist;
    label_ = recover_labels(s_);
    geo_.assign(static_cast<std::size_t>(m_) * m_, 0);
    adj_.assign(m_, {});
    for (int z = 0; z < m_; ++z) {
        for (int y = 0; y < m_; ++y) {
            double detour = d(z, y) - (label_[z] - label_[y]);
            geo_[static_cast<std::size_t>(z) * m_ + y] = std::abs(detour) <= p_.tol_geo;
            if (y != z && d(z, y) < p_.eps_graph) adj_[z].push_back(y);
        }
    }
}

std::vector<double> recover_labels(const MarkedSphereSample& s) {
    check_sample(s);
    std::vector<double> l(s.dist.m);
    const double base = s.dist(s.i0, s.i1);
    for (int i = 0; i < s.dist.m; ++i) l[i] = s.dist(i, s.i1) - base;
    return l;
}

std::vector<int> SphereInverse::extract_geodesic(int i, int j, double tol) const {
    if (i < 0 || i >= m_ || j < 0 || j >= m_) throw ParameterError("extract_geodesic: index out of range");
    if (tol < 0) throw ParameterError("extract_geodesic: tol must be >= 0");
    const auto& d = s_.dist;
    std::vector<int> chain{i};
    if (i == j) return chain;
    const double max_gap = 3 * p_.r_cov;
    auto rec = [&](auto&& self, int a, int b) -> void {
        const double len = d(a, b);
        int best = -1;
        double best_score = kInf;
        for (int z = 0; z < m_; ++z) {
            if (z == a || z == b) continue;
            double da = d(a, z), db = d(z, b);
            if (da <= tol || db <= tol || da + db > len + tol) continue;
            double score = std::abs(da - len / 2) + (da + db - len);
            if (score < best_score) best_score = score, best = z;
        }
        if (best < 0) {
            if (len > max_gap)
                throw SamplingError("extract_geodesic: no admissible midpoint on a gap of " +
                                    std::to_string(len));
            return;
        }
        self(self, a, best);
        chain.push_back(best);
        self(self, best, b);
    };
    rec(rec, i, j);
    chain.push_back(j);
    return chain;
}

std::vector<int> SphereInverse::geodesic_set(int z) const {
    std::vector<int> out;
    for (int y = 0; y < m_; ++y)
        if (y == z || y == s_.i1 || on_geodesic(z, y)) out.push_back(y);
    return out;
}

const LocusClassification& SphereInverse::classification() const {
    if (classified_) return cls_;
    const auto& d = s_.dist;
    LocusClassification c;
    c.params = p_;
    c.in_cut.assign(m_, 0);
    c.in_geo.assign(m_, 0);
    c.in_plain.assign(m_, 0);
    c.cut_margin.assign(m_, -kInf);
    c.geo_margin.assign(m_, -kInf);
    const double sep = p_.sep_radius;
    parallel_for(m_, [&](std::size_t ii) {
        const int i = static_cast<int>(ii);
        if (i == s_.i0 || i == s_.i1) return;
        const double len = d(i, s_.i1);
        // Points of the geodesics from i to x1 around half distance; two of
        // them far apart transversally witness two distinct geodesics.
        const double half_width = std::max(0.1 * len, p_.r_cov);
        std::vector<int> mid;
        for (int y = 0; y < m_; ++y)
            if (on_geodesic(i, y) && std::abs(d(i, y) - len / 2) <= half_width) mid.push_back(y);
        double gap = 0;
        for (std::size_t a = 0; a < mid.size(); ++a)
            for (std::size_t b = a + 1; b < mid.size(); ++b) {
                int y = mid[a], w = mid[b];
                gap = std::max(gap, d(y, w) - std::abs(d(i, y) - d(i, w)));
            }
        c.cut_margin[i] = gap - sep;
        // i strictly inside the geodesic from another point w to x1.
        double reach = 0;
        for (int w = 0; w < m_; ++w)
            if (w != i && on_geodesic(w, i)) reach = std::max(reach, d(w, i));
        c.geo_margin[i] = std::min(reach, len) - sep;
    });
    for (int i = 0; i < m_; ++i) {
        bool cut = c.cut_margin[i] >= 0, geo = c.geo_margin[i] >= 0;
        if (cut && geo) (c.cut_margin[i] >= c.geo_margin[i] ? geo : cut) = false;
        c.in_cut[i] = cut;
        c.in_geo[i] = geo;
        c.in_plain[i] = !cut && !geo;
    }
    cls_ = std::move(c);
    classified_ = true;
    return cls_;
}

std::vector<int> SphereInverse::loop_components(const std::vector<int>& loop) const {
    const auto& d = s_.dist;
    std::vector<double> reach(m_, kInf);
    for (int y = 0; y < m_; ++y)
        for (int a : loop) reach[y] = std::min(reach[y], d(y, a));
    std::vector<char> alive(m_);
    for (int y = 0; y < m_; ++y) alive[y] = reach[y] > p_.eta;
    return components(adj_, alive, &reach, 2 * p_.eta, &d);
}

void SphereInverse::ensure_separations() const {
    if (separated_) return;
    const auto& c = classification();
    std::vector<std::vector<int>> sep(m_);
    parallel_for(m_, [&](std::size_t z) {
        if (c.in_cut[z]) sep[z] = loop_components(geodesic_set(static_cast<int>(z)));
    });
    sep_ = std::move(sep);
    separated_ = true;
}

const std::vector<int>& SphereInverse::separation(int z) const {
    if (z < 0 || z >= m_) throw ParameterError("separation: index out of range");
    ensure_separations();
    if (sep_[z].empty()) throw ParameterError("separation: point is not in the cut locus");
    return sep_[z];
}

std::vector<int> SphereInverse::branch_between(int x, int y) const {
    if (x < 0 || x >= m_ || y < 0 || y >= m_) throw ParameterError("branch_between: index out of range");
    if (x == y) return {};
    std::vector<char> all(m_, 1);
    auto base = components(adj_, all, nullptr, 0, nullptr);
    if (base[x] != base[y])
        throw SamplingError("branch_between: neighborhood graph already separates the endpoints");
    ensure_separations();
    std::vector<int> out;
    for (int z = 0; z < m_; ++z) {
        if (z == x || z == y || sep_[z].empty()) continue;
        const auto& comp = sep_[z];
        if (comp[x] >= 0 && comp[y] >= 0 && comp[x] != comp[y]) out.push_back(z);
    }
    std::stable_sort(out.begin(), out.end(),
                     [&](int a, int b) { return label_[a] < label_[b]; });
    return out;
}

LoopRegions SphereInverse::jordan_loop(int x) const {
    if (x < 0 || x >= m_) throw ParameterError("jordan_loop: index out of range");
    if (x == s_.i0) throw ParameterError("jordan_loop: x must differ from i0");
    const int i0 = s_.i0;
    std::vector<char> in_loop(m_, 0);
    for (int z : branch_between(i0, x)) in_loop[z] = 1;
    in_loop[i0] = in_loop[x] = 1;
    // Geodesics from x and x0 toward x1 up to the point where they merge.
    int merge = s_.i1;
    for (int y = 0; y < m_; ++y)
        if (on_geodesic(x, y) && on_geodesic(i0, y) && label_[y] > label_[merge]) merge = y;
    const double floor = label_[merge] - p_.tol_geo;
    for (int y = 0; y < m_; ++y)
        if ((on_geodesic(x, y) || on_geodesic(i0, y)) && label_[y] >= floor) in_loop[y] = 1;

    LoopRegions r;
    for (int y = 0; y < m_; ++y)
        if (in_loop[y]) r.loop.push_back(y);
    auto comp = loop_components(r.loop);
    int count = 0;
    for (int v : comp) count = std::max(count, v + 1);
    std::vector<double> mass(count, 0.0);
    for (int y = 0; y < m_; ++y)
        if (comp[y] >= 0) mass[comp[y]] += s_.mass[y];
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mass[a] > mass[b]; });
    if (count < 2 || mass[order[1]] < p_.macro_mass)
        throw SamplingError("jordan_loop: " + std::to_string(count) +
                            " components, second largest mass " +
                            std::to_string(count < 2 ? 0.0 : mass[order[1]]) + " (loop size " +
                            std::to_string(r.loop.size()) + ")");
    for (int y = 0; y < m_; ++y) {
        if (comp[y] == order[0]) {
            r.region_a.push_back(y);
            r.mass_a += s_.mass[y];
        } else if (comp[y] == order[1]) {
            r.region_b.push_back(y);
            r.mass_b += s_.mass[y];
        } else {
            r.excluded.push_back(y);
            r.mass_excluded += s_.mass[y];
        }
    }
    return r;
}

double SphereInverse::recover_orientation_time(bool* low_confidence) const {
    if (!s_.epsilon) throw ParameterError("recover_orientation_time: epsilon missing");
    auto r = jordan_loop(s_.i1);
    const double total = r.mass_a + r.mass_b;
    if (low_confidence) *low_confidence = r.mass_a - r.mass_b < 2.0 / m_;
    return (*s_.epsilon == 1 ? r.mass_b : r.mass_a) / total;
}

std::vector<double> SphereInverse::recover_parametrization(RecoveredSnake* diag) const {
    if (!s_.epsilon) throw ParameterError("recover_parametrization: epsilon missing");
    auto ref = jordan_loop(s_.i1);
    const auto& ref_region = *s_.epsilon == 1 ? ref.region_b : ref.region_a;
    std::vector<char> in_ref(m_, 0);
    for (int y : ref_region) in_ref[y] = 1;

    std::vector<double> time(m_, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> violation(m_, 0.0);
    time[s_.i0] = 0;
    parallel_for(m_, [&](std::size_t xx) {
        const int x = static_cast<int>(xx);
        if (x == s_.i0 || s_.dist(x, s_.i0) == 0) {
            time[x] = 0;
            return;
        }
        LoopRegions r;
        try {
            r = jordan_loop(x);
        } catch (const SamplingError&) {
            return;
        }
        // D_x is the region nested with D_{x1}: contained in it or
        // containing it.
        auto nest = [&](const std::vector<int>& region) {
            std::vector<char> in(m_, 0);
            double outside = 0, missing = 0;
            for (int y : region) {
                in[y] = 1;
                if (!in_ref[y]) outside += s_.mass[y];
            }
            for (int y : ref_region)
                if (!in[y]) missing += s_.mass[y];
            return std::min(outside, missing);
        };
        double va = nest(r.region_a), vb = nest(r.region_b);
        double dmass = va <= vb ? r.mass_a : r.mass_b;
        violation[x] = std::min(va, vb);
        time[x] = dmass / (r.mass_a + r.mass_b);
    });
    // Points whose loop did not split take the time of their nearest
    // resolved neighbor (lowest index on ties).
    int failures = 0;
    std::vector<double> filled = time;
    for (int x = 0; x < m_; ++x) {
        if (!std::isnan(time[x])) continue;
        ++failures;
        int best = -1;
        for (int y = 0; y < m_; ++y)
            if (!std::isnan(time[y]) && (best < 0 || s_.dist(x, y) < s_.dist(x, best))) best = y;
        filled[x] = best < 0 ? 0.0 : time[best];
    }
    if (diag) {
        diag->loop_failures = failures;
        diag->max_nesting_violation = *std::max_element(violation.begin(), violation.end());
    }
    return filled;
}

double SphereInverse::recover_contour_value(int x) const {
    if (x < 0 || x >= m_) throw ParameterError("recover_contour_value: index out of range");
    if (x == s_.i0 || s_.dist(x, s_.i0) == 0) return 0;
    auto branch = branch_between(s_.i0, x);
    std::stable_sort(branch.begin(), branch.end(), [&](int a, int b) {
        return s_.dist(s_.i0, a) < s_.dist(s_.i0, b);
    });
    std::vector<double> values{label_[s_.i0]};
    for (int z : branch) values.push_back(label_[z]);
    values.push_back(label_[x]);
    if (values.size() < 4)
        throw SamplingError("recover_contour_value: branch has only " +
                            std::to_string(branch.size()) + " points");
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / values.size());
    if (sd == 0) return 0;
    return duration(values, dyadic_schedule(sd, 3, 6)).value;
}

RecoveredSnake SphereInverse::phi() const {
    RecoveredSnake out;
    out.time_of = recover_parametrization(&out);
    out.s_star_hat = recover_orientation_time(&out.low_confidence_orientation);
    out.contour.assign(m_, std::numeric_limits<double>::quiet_NaN());
    ensure_separations();
    std::vector<char> failed(m_, 0);
    parallel_for(m_, [&](std::size_t x) {
        try {
            out.contour[x] = recover_contour_value(static_cast<int>(x));
        } catch (const SamplingError&) {
            failed[x] = 1;
        }
    });
    out.branch_failures = static_cast<int>(std::count(failed.begin(), failed.end(), 1));

    std::vector<double> tf, vf;
    for (int x = 0; x < m_; ++x)
        if (!failed[x]) {
            tf.push_back(out.time_of[x]);
            vf.push_back(out.contour[x]);
        }
    out.h.n = m_;
    out.h.f = interpolate_on_grid(tf, vf, m_, 0.0, 0.0);
    for (double& v : out.h.f) v = std::max(v, 0.0);
    out.h.g = interpolate_on_grid(out.time_of, label_, m_, 0.0, 0.0);
    return out;
}

SphereInverse SphereInverse::with_epsilon(int epsilon) const {
    if (epsilon != 1 && epsilon != -1) throw ParameterError("with_epsilon: epsilon must be +1 or -1");
    // The caches depend on the metric only, never on the orientation bit.
    SphereInverse copy = *this;
    copy.s_.epsilon = epsilon;
    return copy;
}

std::vector<double> interpolate_on_grid(std::vector<double> times, std::vector<double> values,
                                        int res, double at0, double at1) {
    if (res < 1) throw ParameterError("interpolate_on_grid: resolution must be >= 1");
    if (times.size() != values.size()) throw ParameterError("interpolate_on_grid: size mismatch");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(times.size() + 2);
    pts.emplace_back(0.0, at0);
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] > 0 && times[i] < 1) pts.emplace_back(times[i], values[i]);
    pts.emplace_back(1.0, at1);
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    // Average values sharing a time; the endpoints keep their prescribed values.
    std::vector<std::pair<double, double>> knots;
    for (std::size_t i = 0; i < pts.size();) {
        std::size_t j = i;
        double sum = 0;
        while (j < pts.size() && pts[j].first == pts[i].first) sum += pts[j++].second;
        double v = sum / (j - i);
        if (pts[i].first == 0.0) v = at0;
        if (pts[i].first == 1.0) v = at1;
        knots.emplace_back(pts[i].first, v);
        i = j;
    }
    std::vector<double> out(res + 1);
    std::size_t k = 0;
    for (int i = 0; i <= res; ++i) {
        double u = static_cast<double>(i) / res;
        while (k + 2 < knots.size() && knots[k + 1].first < u) ++k;
        auto [t0, v0] = knots[k];
        auto [t1, v1] = knots[k + 1];
        out[i] = t1 > t0 ? v0 + (v1 - v0) * std::clamp((u - t0) / (t1 - t0), 0.0, 1.0) : v0;
    }
    return out;
}

std::vector<int> extract_geodesic(const MarkedSphereSample& s, int i, int j, double tol) {
    return SphereInverse(s).extract_geodesic(i, j, tol);
}

LocusClassification classify_cut_locus(const MarkedSphereSample& s, const InverseParams& p) {
    return SphereInverse(s, p).classification();
}

std::vector<int> branch_between(const MarkedSphereSample& s, int x, int y, const InverseParams& p) {
    return SphereInverse(s, p).branch_between(x, y);
}

LoopRegions jordan_loop(const MarkedSphereSample& s, int x, const InverseParams& p) {
    return SphereInverse(s, p).jordan_loop(x);
}

double recover_orientation_time(const MarkedSphereSample& s, const InverseParams& p) {
    return SphereInverse(s, p).recover_orientation_time();
}

std::vector<double> recover_parametrization(const MarkedSphereSample& s, const InverseParams& p) {
    return SphereInverse(s, p).recover_parametrization();
}

double recover_contour_value(const MarkedSphereSample& s, int x, const InverseParams& p) {
    return SphereInverse(s, p).recover_contour_value(x);
}

RecoveredSnake phi(const MarkedSphereSample& s, const InverseParams& p) {
    return SphereInverse(s, p).phi();
}

}  // namespace bsphere
