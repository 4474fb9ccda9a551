#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "bsphere/errors.hpp"
#include "bsphere/mating.hpp"
#include "bsphere/rtree.hpp"
#include "bsphere/snake.hpp"

using namespace bsphere;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tree distance on the circle by direct scans over the closed arcs.
double naive_tree_dist(const std::vector<double>& v, int s, int t) {
    int a = std::min(s, t), b = std::max(s, t);
    double inner = *std::min_element(v.begin() + a, v.begin() + b + 1);
    double outer = std::min(*std::min_element(v.begin(), v.begin() + a + 1),
                            *std::min_element(v.begin() + b, v.end()));
    return v[s] + v[t] - 2 * std::max(inner, outer);
}

struct Oracle {
    int n;
    std::vector<std::vector<double>> dg, df;
    Oracle(const ContourPair& h) : n(h.n), dg(n, std::vector<double>(n)), df(dg) {
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                dg[s][t] = naive_tree_dist(h.g, s, t);
                df[s][t] = naive_tree_dist(h.f, s, t);
            }
    }
    // All chains of k d_g hops separated by glue jumps d_f < delta (a jump
    // to the same time is always allowed).
    std::vector<double> chains(int s, int k, double delta) const {
        std::vector<double> best = dg[s];
        for (int round = 2; round <= k; ++round) {
            std::vector<double> glued(n, kInf), next(n, kInf);
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    if (x == y || df[x][y] < delta) glued[y] = std::min(glued[y], best[x]);
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z) next[z] = std::min(next[z], glued[y] + dg[y][z]);
            best = next;
        }
        return best;
    }
    // Unbounded chains: Dijkstra on d_g edges plus zero-weight glue edges.
    std::vector<double> limit(int s, double delta) const {
        std::vector<double> dist(n, kInf);
        std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>, std::greater<>> pq;
        dist[s] = 0;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (int v = 0; v < n; ++v) {
                double w = df[u][v] < delta ? 0.0 : dg[u][v];
                if (d + w < dist[v]) {
                    dist[v] = d + w;
                    pq.push({dist[v], v});
                }
            }
        }
        return dist;
    }
};

std::vector<int> all_times(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

}  // namespace

TEST(ChainDist, OneHopIsLabelTreeDistance) {
    auto h = sample_snake(256, 1);
    ChainRelaxation relax(h);
    for (int s = 0; s < 256; s += 11)
        for (int t = 0; t <= 256; t += 7) EXPECT_NEAR(relax.chain_dist(1, s, t), naive_tree_dist(h.g, s, t), 1e-12);
    EXPECT_THROW(relax.chain_dist(0, 1, 2), ParameterError);
}

TEST(ChainDist, MatchesBruteForceChains) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto h = sample_snake(64, seed);
        Oracle oracle(h);
        for (double delta : {default_delta(h), 0.3, 0.0}) {
            ChainRelaxation relax(h, delta);
            for (int s = 0; s < 64; s += 9)
                for (int k = 1; k <= 5; ++k) {
                    auto want = oracle.chains(s, k, delta);
                    auto got = relax.distances_after(s, k);
                    for (int t = 0; t < 64; ++t) ASSERT_NEAR(got[t], want[t], 1e-12) << seed << " " << delta << " " << k;
                }
        }
    }
}

TEST(ChainDist, ConvergesToGraphLimit) {
    auto h = sample_snake(400, 9);
    Oracle oracle(h);
    ChainRelaxation relax(h);
    for (int s = 0; s < 400; s += 37) {
        auto row = relax.relax_from(s, 400, 0.0);
        EXPECT_TRUE(row.converged);
        auto want = oracle.limit(s, relax.delta());
        for (int t = 0; t < 400; ++t) ASSERT_NEAR(row.dist[t], want[t], 1e-12);
    }
}

TEST(ChainDist, MonotoneInRoundsAndDelta) {
    auto h = sample_snake(512, 3);
    ChainRelaxation small(h), large(h, 0.2);
    for (int s : {0, 100, 333}) {
        std::vector<double> previous(512, kInf);
        for (int k = 1; k <= 8; ++k) {
            auto a = small.distances_after(s, k);
            auto b = large.distances_after(s, k);
            for (int t = 0; t < 512; ++t) {
                EXPECT_LE(a[t], previous[t]);
                EXPECT_LE(b[t], a[t] + 1e-12);
            }
            previous = a;
        }
    }
}

TEST(ChainDist, RootDistanceIdentity) {
    auto h = sample_snake(2048, 5);
    ChainRelaxation relax(h);
    const int star = marks(h).s_star;
    const double gmin = h.g[star];
    auto row = relax.relax_from(star, 50, 1e-9);
    for (int s = 0; s < 2048; ++s) EXPECT_NEAR(row.dist[s], h.g[s] - gmin, 1e-12);
}

TEST(SphereMatrix, SinglePoint) {
    auto h = sample_snake(128, 2);
    auto d = sphere_matrix(h, {17});
    ASSERT_EQ(d.m, 1);
    EXPECT_EQ(d(0, 0), 0.0);
}

TEST(SphereMatrix, PseudometricSuite) {
    auto h = sample_snake(1024, 14);
    auto sample = select_sample(h, 120);
    SphereBuildInfo info;
    auto d = sphere_matrix(h, sample, {}, &info);
    EXPECT_TRUE(info.converged);
    TreeView tf(h.f);
    for (int i = 0; i < d.m; ++i) {
        EXPECT_EQ(d(i, i), 0.0);
        for (int j = 0; j < d.m; ++j) {
            EXPECT_EQ(d(i, j), d(j, i));
            EXPECT_LE(d(i, j), naive_tree_dist(h.g, d.points[i], d.points[j]) + 1e-12);
            if (tf.dist(d.points[i], d.points[j]) == 0.0) {
                EXPECT_EQ(d(i, j), 0.0);
            }
        }
    }
    EXPECT_LE(d.max_triangle_violation(), 1e-9);
}

TEST(SphereMatrix, ReflectionIsExact) {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto h = sample_snake(1024, seed);
        auto sample = select_sample(h, 100);
        auto r = reverse(h);
        std::vector<int> rsample;
        for (int p : sample) rsample.push_back((h.n - p) % h.n);
        std::sort(rsample.begin(), rsample.end());
        auto d = sphere_matrix(h, sample);
        auto dr = sphere_matrix(r, rsample);
        auto index = [&](int p) {
            return static_cast<int>(std::lower_bound(rsample.begin(), rsample.end(), (h.n - p) % h.n) - rsample.begin());
        };
        int mismatches = 0;
        for (int i = 0; i < d.m; ++i)
            for (int j = 0; j < d.m; ++j)
                mismatches += d(i, j) != dr(index(d.points[i]), index(d.points[j]));
        EXPECT_EQ(mismatches, 0) << "seed " << seed;
    }
}

TEST(SampleSelection, ForcesMarkedPoints) {
    auto h = sample_snake(4096, 8);
    auto s = select_sample(h, 300);
    EXPECT_EQ(s.size(), 300u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_NE(std::find(s.begin(), s.end(), first_argmin(h.f) % h.n), s.end());
    EXPECT_NE(std::find(s.begin(), s.end(), first_argmin(h.g) % h.n), s.end());
    EXPECT_EQ(select_sample(h, 5000), all_times(4096));
}

TEST(AssembleMarked, MassesAndMarks) {
    auto h = sample_snake(1024, 21);
    auto sample = select_sample(h, 80);
    auto marked = assemble_marked(h, sphere_matrix(h, sample));
    double total = 0;
    for (double m : marked.mass) {
        EXPECT_DOUBLE_EQ(m, 1.0 / 80);
        total += m;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(marked.dist(marked.i0, marked.i1), -*std::min_element(h.g.begin(), h.g.end()), 1e-12);
    ASSERT_TRUE(marked.epsilon.has_value());
    EXPECT_EQ(*marked.epsilon, marks(h).epsilon);
    DistanceMatrix partial = sphere_matrix(h, {1, 2, 3});
    EXPECT_THROW(assemble_marked(h, partial), ParameterError);
}
