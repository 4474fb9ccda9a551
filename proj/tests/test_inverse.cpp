#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "bsphere/errors.hpp"
#include "bsphere/inverse.hpp"
#include "bsphere/mating.hpp"
#include "bsphere/rng.hpp"
#include "bsphere/snake.hpp"

using namespace bsphere;

namespace {

struct Built {
    ContourPair h;
    MarkedSphereSample s;
};

const Built& sphere(int seed) {
    static std::vector<std::unique_ptr<Built>> cache(8);
    auto& slot = cache[seed];
    if (!slot) {
        slot = std::make_unique<Built>();
        slot->h = sample_snake(2048, seed);
        auto d = sphere_matrix(slot->h, select_sample(slot->h, 400));
        slot->s = assemble_marked(slot->h, std::move(d));
    }
    return *slot;
}

MarkedSphereSample permuted(const MarkedSphereSample& s, const std::vector<int>& perm) {
    // perm[new] = old
    MarkedSphereSample out = s;
    const int m = s.dist.m;
    std::vector<int> inv(m);
    for (int k = 0; k < m; ++k) inv[perm[k]] = k;
    for (int a = 0; a < m; ++a) {
        out.dist.points[a] = s.dist.points[perm[a]];
        out.mass[a] = s.mass[perm[a]];
        for (int b = 0; b < m; ++b) out.dist(a, b) = s.dist(perm[a], perm[b]);
    }
    out.i0 = inv[s.i0];
    out.i1 = inv[s.i1];
    return out;
}

}  // namespace

TEST(Inverse, LabelsMatchGeneratingSnake) {
    for (int seed : {1, 2, 3}) {
        const auto& b = sphere(seed);
        auto l = recover_labels(b.s);
        auto [lo, hi] = std::minmax_element(b.h.g.begin(), b.h.g.end());
        const double range = *hi - *lo;
        EXPECT_EQ(l[b.s.i0], 0.0);
        EXPECT_DOUBLE_EQ(l[b.s.i1], -b.s.dist(b.s.i0, b.s.i1));
        for (int i = 0; i < b.s.dist.m; ++i)
            ASSERT_NEAR(l[i], b.h.g[b.s.dist.points[i]], 1e-3 * range) << "point " << i;
    }
}

TEST(Inverse, GeodesicChainsSatisfyDetourBound) {
    const auto& b = sphere(1);
    SphereInverse inv(b.s);
    const auto& d = b.s.dist;
    const double tol = 1e-6 * d.diameter();
    EXPECT_EQ(inv.extract_geodesic(5, 5, tol), std::vector<int>{5});
    auto rng = make_rng(11);
    int built = 0;
    for (int k = 0; k < 30; ++k) {
        int i = static_cast<int>(rng() % d.m);
        int j = k % 2 ? b.s.i1 : static_cast<int>(rng() % d.m);
        std::vector<int> chain;
        try {
            chain = inv.extract_geodesic(i, j, tol);
        } catch (const SamplingError&) {
            continue;
        }
        ++built;
        ASSERT_EQ(chain.front(), i);
        ASSERT_EQ(chain.back(), j);
        for (int z : chain) EXPECT_LE(d(i, z) + d(z, j), d(i, j) + tol);
        // Chains are ordered along the geodesic.
        for (std::size_t q = 1; q < chain.size(); ++q)
            EXPECT_LE(d(i, chain[q - 1]), d(i, chain[q]) + tol);
        if (j == b.s.i1) {
            const auto& l = inv.labels();
            for (std::size_t q = 1; q < chain.size(); ++q)
                EXPECT_LE(l[chain[q]], l[chain[q - 1]] + tol);
        }
    }
    EXPECT_GT(built, 10);
}

TEST(Inverse, ClassifierIsExclusiveAndSparesMarkedPoints) {
    for (int seed : {1, 2}) {
        const auto& b = sphere(seed);
        auto c = classify_cut_locus(b.s);
        EXPECT_TRUE(c.in_plain[b.s.i1]);
        EXPECT_TRUE(c.in_plain[b.s.i0]);
        for (int i = 0; i < b.s.dist.m; ++i) {
            EXPECT_FALSE(c.in_cut[i] && c.in_geo[i]);
            EXPECT_EQ(c.in_plain[i], !c.in_cut[i] && !c.in_geo[i]);
        }
        EXPECT_GT(c.params.r_cov, 0);
        EXPECT_GT(c.params.eps_graph, 0);
    }
}

TEST(Inverse, ClassifierIgnoresSampleOrder) {
    const auto& b = sphere(2);
    const int m = b.s.dist.m;
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    auto rng = make_rng(5);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto p = permuted(b.s, perm);
    // Point indices are scrambled too, so nothing can leak through them.
    for (auto& v : p.dist.points) v = 0;
    auto c0 = classify_cut_locus(b.s);
    auto c1 = classify_cut_locus(p);
    for (int k = 0; k < m; ++k) {
        EXPECT_EQ(c1.in_cut[k], c0.in_cut[perm[k]]);
        EXPECT_EQ(c1.in_geo[k], c0.in_geo[perm[k]]);
    }
    auto l0 = recover_labels(b.s), l1 = recover_labels(p);
    for (int k = 0; k < m; ++k) EXPECT_EQ(l1[k], l0[perm[k]]);
}

TEST(Inverse, LoopRegionsPartitionTheSample) {
    int checked = 0;
    for (int seed : {1, 2, 3}) {
        const auto& b = sphere(seed);
        SphereInverse inv(b.s);
        EXPECT_TRUE(inv.branch_between(7, 7).empty());
        for (int x : {b.s.i1, 3, 17, 101}) {
            if (x == b.s.i0) continue;
            LoopRegions r;
            try {
                r = inv.jordan_loop(x);
            } catch (const SamplingError&) {
                continue;
            }
            ++checked;
            std::vector<int> seen(b.s.dist.m, 0);
            for (int y : r.region_a) ++seen[y];
            for (int y : r.region_b) ++seen[y];
            for (int y : r.excluded) ++seen[y];
            for (int v : seen) EXPECT_EQ(v, 1);
            EXPECT_NEAR(r.mass_a + r.mass_b + r.mass_excluded, 1.0, 1e-12);
            EXPECT_GE(r.mass_a, r.mass_b);
            EXPECT_GE(r.mass_b, inv.params().macro_mass);
            // Loop points lie in the removed band.
            for (int y : r.loop) EXPECT_EQ(std::count(r.excluded.begin(), r.excluded.end(), y), 1);
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(Inverse, EpsilonFlipComplementsOrientationTime) {
    int checked = 0;
    for (int seed : {1, 2, 3}) {
        auto s = sphere(seed).s;
        double a, b;
        try {
            a = recover_orientation_time(s);
            s.epsilon = -*s.epsilon;
            b = recover_orientation_time(s);
        } catch (const SamplingError&) {
            continue;
        }
        ++checked;
        EXPECT_NEAR(a + b, 1.0, 1e-12);
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0);
    }
    EXPECT_GT(checked, 0);
}

TEST(Inverse, PhiIsDeterministicAndWellFormed) {
    const auto& b = sphere(3);
    auto r1 = phi(b.s), r2 = phi(b.s);
    EXPECT_EQ(r1.h, r2.h);
    EXPECT_EQ(r1.time_of, r2.time_of);
    EXPECT_EQ(r1.h.n, b.s.dist.m);
    EXPECT_EQ(r1.time_of[b.s.i0], 0.0);
    EXPECT_EQ(r1.h.f.front(), 0.0);
    EXPECT_EQ(r1.h.f.back(), 0.0);
    EXPECT_EQ(r1.h.g.front(), 0.0);
    for (double v : r1.h.f) EXPECT_GE(v, 0.0);
    for (double t : r1.time_of) {
        EXPECT_GE(t, 0.0);
        EXPECT_LE(t, 1.0);
    }
    EXPECT_NO_THROW(validate(r1.h));
    EXPECT_EQ(recover_contour_value(b.s, b.s.i0), 0.0);
}

TEST(Inverse, InterpolationOnGrid) {
    auto v = interpolate_on_grid({0.5, 0.25}, {2.0, 1.0}, 4, 0.0, 0.0);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_DOUBLE_EQ(v[0], 0.0);
    EXPECT_DOUBLE_EQ(v[1], 1.0);
    EXPECT_DOUBLE_EQ(v[2], 2.0);
    EXPECT_DOUBLE_EQ(v[3], 1.0);
    EXPECT_DOUBLE_EQ(v[4], 0.0);
    // Equal times average.
    auto w = interpolate_on_grid({0.5, 0.5}, {1.0, 3.0}, 2, 0.0, 0.0);
    EXPECT_DOUBLE_EQ(w[1], 2.0);
    EXPECT_THROW(interpolate_on_grid({0.5}, {}, 2, 0, 0), ParameterError);
}

TEST(Inverse, RejectsDegenerateInput) {
    auto s = sphere(1).s;
    auto same = s;
    same.i1 = same.i0;
    EXPECT_THROW(recover_labels(same), ParameterError);
    auto bad_mass = s;
    bad_mass.mass[0] += 0.5;
    EXPECT_THROW(SphereInverse{bad_mass}, ParameterError);
    MarkedSphereSample tiny;
    tiny.dist.m = 10;
    tiny.dist.values.assign(100, 0.0);
    tiny.mass.assign(10, 0.1);
    tiny.i1 = 1;
    EXPECT_THROW(recover_labels(tiny), ParameterError);
    auto no_eps = s;
    no_eps.epsilon.reset();
    EXPECT_THROW(recover_orientation_time(no_eps), ParameterError);
    SphereInverse inv(s);
    EXPECT_THROW(inv.jordan_loop(s.i0), ParameterError);
    EXPECT_THROW(inv.extract_geodesic(0, s.dist.m, 0.0), ParameterError);
}
