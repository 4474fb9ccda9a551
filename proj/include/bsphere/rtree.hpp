#pragma once

#include <span>
#include <vector>

namespace bsphere {

// Sparse-table range minimum: O(n log n) build, O(1) queries on closed
// index ranges. Ties resolve to the smallest index.
class RangeMin {
public:
    RangeMin() = default;
    explicit RangeMin(std::span<const double> values);

    int argmin(int lo, int hi) const;
    double min(int lo, int hi) const { return values_[argmin(lo, hi)]; }
    int size() const { return static_cast<int>(values_.size()); }

private:
    std::vector<double> values_;
    std::vector<std::vector<int>> table_;
};

// The rooted tree coded by a contour f sampled at i/n, i = 0..n, read on
// the circle (index n is identified with index 0).
class TreeView {
public:
    explicit TreeView(std::vector<double> f, double glue_tol = 0.0);

    int n() const { return n_; }
    const std::vector<double>& values() const { return f_; }
    double glue_tol() const { return glue_tol_; }
    // Grid index of the root class (first argmin of f).
    int root() const { return root_; }

    // f(s) + f(t) - 2 max(min over [s,t], min over the complementary arc).
    double dist(int s, int t) const;

    // min(f) over the cyclic arc running forward from a to b (inclusive).
    double arc_min(int a, int b) const;

    // Grid proxy for "at least two preimages": some t != s in [0, n) is
    // within tol of s. With min_mass > 0 the test instead asks for at least
    // two complementary components of mass >= min_mass, which discards
    // mesh-scale branching.
    bool is_skeleton(int s, double tol, double min_mass = 0.0) const;

    // Grid indices tracing the tree geodesic from s to t: the ancestor line
    // of s down to the branch point, then up to t.
    std::vector<int> geodesic_segment(int s, int t) const;

    // Masses of the components of the complement of the class of s (points
    // within tol), as grid fractions in cyclic order starting after s.
    std::vector<double> subtree_masses(int s, double tol) const;

    // Default continuum-proxy tolerance: 2 * max |f[i+1] - f[i]|.
    double proxy_tol() const;

private:
    void check_index(int i) const;

    int n_ = 0;
    std::vector<double> f_;
    double glue_tol_ = 0.0;
    int root_ = 0;
    RangeMin rmq_;
};

}  // namespace bsphere
