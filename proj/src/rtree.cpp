#include "bsphere/rtree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "bsphere/errors.hpp"

namespace bsphere {

RangeMin::RangeMin(std::span<const double> values) : values_(values.begin(), values.end()) {
    const int n = static_cast<int>(values_.size());
    if (n == 0) return;
    const int levels = std::bit_width(static_cast<unsigned>(n));
    table_.assign(levels, {});
    table_[0].resize(n);
    for (int i = 0; i < n; ++i) table_[0][i] = i;
    for (int k = 1; k < levels; ++k) {
        const int len = 1 << k;
        table_[k].resize(n - len + 1);
        for (int i = 0; i + len <= n; ++i) {
            int a = table_[k - 1][i];
            int b = table_[k - 1][i + len / 2];
            table_[k][i] = values_[b] < values_[a] ? b : a;
        }
    }
}

int RangeMin::argmin(int lo, int hi) const {
    const int k = std::bit_width(static_cast<unsigned>(hi - lo + 1)) - 1;
    int a = table_[k][lo];
    int b = table_[k][hi - (1 << k) + 1];
    return values_[b] < values_[a] ? b : a;
}

TreeView::TreeView(std::vector<double> f, double glue_tol)
    : n_(static_cast<int>(f.size()) - 1), f_(std::move(f)), glue_tol_(glue_tol) {
    if (n_ < 1) throw ParameterError("TreeView: contour needs at least two values");
    if (!(glue_tol_ >= 0.0)) throw ParameterError("TreeView: glue tolerance must be >= 0");
    rmq_ = RangeMin(f_);
    root_ = rmq_.argmin(0, n_);
    if (root_ == n_) root_ = 0;
}

void TreeView::check_index(int i) const {
    if (i < 0 || i > n_)
        throw ParameterError("TreeView: index " + std::to_string(i) + " outside [0, " +
                             std::to_string(n_) + "]");
}

double TreeView::arc_min(int a, int b) const {
    if (a <= b) return rmq_.min(a, b);
    return std::min(rmq_.min(a, n_), rmq_.min(0, b));
}

double TreeView::dist(int s, int t) const {
    check_index(s);
    check_index(t);
    if (s == t) return 0.0;
    int a = std::min(s, t), b = std::max(s, t);
    double inner = rmq_.min(a, b);
    double outer = std::min(rmq_.min(0, a), rmq_.min(b, n_));
    return f_[s] + f_[t] - 2.0 * std::max(inner, outer);
}

double TreeView::proxy_tol() const {
    double step = 0.0;
    for (int i = 0; i < n_; ++i) step = std::max(step, std::abs(f_[i + 1] - f_[i]));
    return 2.0 * step;
}

std::vector<double> TreeView::subtree_masses(int s, double tol) const {
    check_index(s);
    const int origin = s % n_;
    std::vector<double> masses;
    int run = 0;
    for (int k = 1; k <= n_; ++k) {
        int u = (origin + k) % n_;
        if (dist(origin, u) <= tol) {
            if (run > 0) masses.push_back(static_cast<double>(run) / n_);
            run = 0;
        } else {
            ++run;
        }
    }
    if (run > 0) masses.push_back(static_cast<double>(run) / n_);
    return masses;
}

bool TreeView::is_skeleton(int s, double tol, double min_mass) const {
    check_index(s);
    if (min_mass <= 0.0) {
        for (int t = 0; t < n_; ++t)
            if (t != s && dist(s, t) <= tol) return true;
        return false;
    }
    auto masses = subtree_masses(s, tol);
    return std::count_if(masses.begin(), masses.end(),
                         [&](double m) { return m >= min_mass; }) >= 2;
}

std::vector<int> TreeView::geodesic_segment(int s, int t) const {
    check_index(s);
    check_index(t);
    if (s == t) return {s};
    if (s % n_ == t % n_) return {s, t};
    // Walk along the arc carrying the larger minimum (the branch point lies
    // there), recording strict running minima from each end.
    const int a = std::min(s, t), b = std::max(s, t);
    double inner = rmq_.min(a, b);
    double outer = std::min(rmq_.min(0, a), rmq_.min(b, n_));
    auto walk = [&](int from, int to, int dir) {
        std::vector<int> line{from};
        double current = f_[from];
        int i = from % n_;
        const int target = to % n_;
        while (i != target) {
            i = (i + dir + n_) % n_;
            if (f_[i] < current) {
                current = f_[i];
                line.push_back(i);
            }
        }
        return line;
    };
    std::vector<int> from_a, from_b;
    if (inner >= outer) {
        from_a = walk(a, b, +1);
        from_b = walk(b, a, -1);
    } else {
        from_a = walk(a, b, -1);
        from_b = walk(b, a, +1);
    }
    // Both lines end at a grid index of the branch point class.
    std::vector<int> path = from_a;
    for (auto it = from_b.rbegin(); it != from_b.rend(); ++it) {
        if (it == from_b.rbegin() && *it == path.back()) continue;
        path.push_back(*it);
    }
    if (s != a) std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace bsphere
