#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "bsphere/cvs.hpp"
#include "bsphere/errors.hpp"

using namespace bsphere::cvs;

TEST(Cvs, SmallestTreeRoundTrips) {
    auto t = tree_from_dyck({true, false}, {1});
    for (int sign : {1, -1}) {
        auto q = cvs_forward(t, sign);
        validate(q);
        EXPECT_EQ(q.vertex_count(), 3);
        auto back = cvs_inverse(q);
        EXPECT_EQ(back.tree, t);
        EXPECT_EQ(back.sign, sign);
    }
}

// Vertex at each contour position, computed directly from the child lists.
std::vector<int> contour_vertices(const LabeledPlaneTree& t) {
    std::vector<int> out;
    std::function<void(int)> go = [&](int v) {
        out.push_back(v);
        for (int c : t.children[v]) {
            go(c);
            out.push_back(v);
        }
    };
    go(0);
    out.pop_back();
    return out;
}

TEST(Cvs, ForwardInverseExhaustive) {
    for (int n = 1; n <= 4; ++n) {
        std::set<std::vector<int>> codes;
        const auto trees = enumerate_trees(n);
        for (const auto& t : trees) {
            const auto contour = contour_vertices(t);
            const int lmin = *std::min_element(t.label.begin(), t.label.end());
            for (int sign : {1, -1}) {
                auto q = cvs_forward(t, sign);
                ASSERT_NO_THROW(validate(q));
                ASSERT_EQ(q.vertex_count(), n + 2);
                ASSERT_EQ(q.faces().size(), static_cast<std::size_t>(n));
                auto d = bfs_labels(q, q.pointed);
                auto vertex = q.vertex_of();
                // Corner c leaves its tree vertex through half-edge 2c.
                for (std::size_t c = 0; c < contour.size(); ++c)
                    ASSERT_EQ(d[vertex[2 * c]], t.label[contour[c]] - lmin + 1);
                codes.insert(canonical_code(q));
                auto back = cvs_inverse(q);
                ASSERT_EQ(back.tree, t) << "n=" << n;
                ASSERT_EQ(back.sign, sign);
            }
        }
        EXPECT_EQ(codes.size(), 2 * trees.size());
    }
}

TEST(Cvs, BfsParity) {
    auto q = cvs_forward(sample_uniform(200, 3), 1);
    auto d = bfs_labels(q, 5);
    auto vertex = q.vertex_of();
    EXPECT_EQ(d[5], 0);
    for (int h = 0; h < q.half_edge_count(); ++h)
        EXPECT_EQ(std::abs(d[vertex[h]] - d[vertex[q.half_edges[h].opp]]), 1);
}

TEST(Cvs, Counting) {
    for (int n = 1; n <= 4; ++n) {
        std::uint64_t p3 = 1;
        for (int i = 0; i < n; ++i) p3 *= 3;
        EXPECT_EQ(enumerate_trees(n).size(), p3 * catalan(n));
        EXPECT_EQ(enumerate_quadrangulations(n).size(), 2 * p3 * catalan(n)) << n;
    }
}

TEST(Cvs, InverseForwardExhaustive) {
    for (int n = 1; n <= 3; ++n)
        for (const auto& q : enumerate_quadrangulations(n)) {
            auto r = cvs_inverse(q);
            EXPECT_EQ(canonical_code(cvs_forward(r.tree, r.sign)), canonical_code(q));
        }
}

TEST(Cvs, MirrorKeepsSignAndLabels) {
    for (int n = 1; n <= 4; ++n)
        for (const auto& t : enumerate_trees(n))
            for (int sign : {1, -1}) {
                auto m = mirror(cvs_forward(t, sign));
                auto back = cvs_inverse(m);
                EXPECT_EQ(back.sign, sign);
                auto a = t.label, b = back.tree.label;
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                EXPECT_EQ(a, b);
                if (n <= 2) {
                    EXPECT_EQ(canonical_code(m), canonical_code(cvs_forward(mirror(t), sign)));
                }
            }
}

TEST(Cvs, MalformedInputsThrow) {
    LabeledPlaneTree t = tree_from_dyck({true, false}, {1});
    t.label[1] = 3;
    EXPECT_THROW(cvs_forward(t, 1), bsphere::StructuralError);
    EXPECT_THROW(cvs_forward(tree_from_dyck({true, false}, {0}), 0), bsphere::ParameterError);
    auto q = cvs_forward(tree_from_dyck({true, true, false, false}, {1, -1}), 1);
    std::swap(q.half_edges[0].next, q.half_edges[1].next);
    EXPECT_THROW(cvs_inverse(q), bsphere::StructuralError);
}

TEST(Cvs, SamplerIsSeededAndUniform) {
    EXPECT_EQ(sample_uniform(50, 9), sample_uniform(50, 9));
    const auto support = enumerate_trees(2);
    ASSERT_EQ(support.size(), 18u);
    std::vector<double> counts(18, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        auto t = sample_uniform(2, 1000 + i);
        auto it = std::find(support.begin(), support.end(), t);
        ASSERT_NE(it, support.end());
        counts[it - support.begin()] += 1;
    }
    double chi2 = 0;
    for (double c : counts) chi2 += (c - draws / 18.0) * (c - draws / 18.0) / (draws / 18.0);
    // 99th percentile of chi-square with 17 degrees of freedom.
    EXPECT_LT(chi2, 33.41);
}

TEST(Cvs, ScalingProfilePositive) {
    auto s = scaling_profile(2000, {1, 2, 3, 4});
    for (double x : s) {
        EXPECT_GT(x, 0);
        EXPECT_TRUE(std::isfinite(x));
    }
}
