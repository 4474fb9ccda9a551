#include "bsphere/mating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bsphere/errors.hpp"
#include "bsphere/parallel.hpp"

namespace bsphere {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cartesian min-tree of values read cyclically from `start`; parent[j] in
// rotated coordinates, -1 at the root (j = 0 holds a global minimum).
std::vector<int> cartesian_parents(const std::vector<double>& values, int start) {
    const int n = static_cast<int>(values.size());
    std::vector<int> parent(n, -1);
    std::vector<int> stack;
    stack.reserve(n);
    auto at = [&](int j) { return values[(start + j) % n]; };
    for (int j = 0; j < n; ++j) {
        int last = -1;
        while (!stack.empty() && at(stack.back()) > at(j)) {
            last = stack.back();
            stack.pop_back();
        }
        if (last >= 0) parent[last] = j;
        if (!stack.empty()) parent[j] = stack.back();
        stack.push_back(j);
    }
    return parent;
}

std::vector<double> cyclic(const std::vector<double>& v, int n) {
    return std::vector<double>(v.begin(), v.begin() + n);
}

int cyclic_argmin(const std::vector<double>& v, int n) {
    return static_cast<int>(std::min_element(v.begin(), v.begin() + n) - v.begin());
}

double smallest_positive_tree_edge(const std::vector<double>& f, int n) {
    auto values = cyclic(f, n);
    int start = cyclic_argmin(f, n);
    auto parent = cartesian_parents(values, start);
    double best = kInf;
    for (int j = 0; j < n; ++j) {
        if (parent[j] < 0) continue;
        double w = values[(start + j) % n] - values[(start + parent[j]) % n];
        if (w > 0) best = std::min(best, w);
    }
    return best;
}

}  // namespace

double default_delta(const ContourPair& h) {
    double w = smallest_positive_tree_edge(h.f, h.n);
    return std::isfinite(w) ? 0.5 * w : 1.0;
}

ChainRelaxation::ChainRelaxation(const ContourPair& h, double delta) : n_(h.n) {
    validate(h);
    delta_ = delta < 0 ? default_delta(h) : delta;
    const auto [gmin, gmax] = std::minmax_element(h.g.begin(), h.g.end());
    label_range_ = *gmax - *gmin;

    // Cartesian tree of g: its path metric with |g| differences as weights
    // is d_g restricted to the grid.
    const int n = n_;
    const auto gvals = cyclic(h.g, n);
    const int start = cyclic_argmin(h.g, n);
    const auto lin_parent = cartesian_parents(gvals, start);
    std::vector<std::vector<int>> children(n);
    for (int j = 0; j < n; ++j)
        if (lin_parent[j] >= 0) children[lin_parent[j]].push_back(j);
    std::vector<int> bfs{0};
    bfs.reserve(n);
    for (std::size_t head = 0; head < bfs.size(); ++head)
        for (int c : children[bfs[head]]) bfs.push_back(c);
    order_.resize(n);
    position_.resize(n);
    parent_.assign(n, -1);
    weight_.assign(n, 0.0);
    for (int id = 0; id < n; ++id) {
        int t = (start + bfs[id]) % n;
        order_[id] = t;
        position_[t] = id;
    }
    for (int id = 1; id < n; ++id) {
        int j = bfs[id];
        int p = lin_parent[j];
        int pt = (start + p) % n;
        parent_[id] = position_[pt];
        weight_[id] = gvals[order_[id]] - gvals[pt];
    }

    // Gluing on the tree of f.
    const auto fvals = cyclic(h.f, n);
    const int fstart = cyclic_argmin(h.f, n);
    const auto fparent = cartesian_parents(fvals, fstart);
    auto fweight = [&](int j) {
        return fvals[(fstart + j) % n] - fvals[(fstart + fparent[j]) % n];
    };
    double min_positive = kInf;
    for (int j = 0; j < n; ++j)
        if (fparent[j] >= 0 && fweight(j) > 0) min_positive = std::min(min_positive, fweight(j));

    if (delta_ <= min_positive) {
        // d_f < delta exactly on zero-weight components: equivalence classes.
        classes_ = true;
        std::vector<int> rep(n, -1);
        for (int j = 0; j < n; ++j) {
            int r = j;
            while (fparent[r] >= 0 && fweight(r) == 0.0) r = fparent[r];
            rep[j] = r;
        }
        std::vector<int> class_index(n, -1);
        class_of_.assign(n, 0);
        class_count_ = 0;
        for (int j = 0; j < n; ++j) {
            int r = rep[j];
            if (class_index[r] < 0) class_index[r] = class_count_++;
            int t = (fstart + j) % n;
            class_of_[position_[t]] = class_index[r];
        }
        if (delta_ == 0.0) {
            // No gluing at all: every point is its own class.
            for (int id = 0; id < n; ++id) class_of_[id] = id;
            class_count_ = n;
        }
    } else {
        // Balls of radius delta in the tree of f, by bounded search.
        classes_ = false;
        std::vector<std::vector<std::pair<int, double>>> adj(n);
        for (int j = 0; j < n; ++j) {
            if (fparent[j] < 0) continue;
            adj[j].push_back({fparent[j], fweight(j)});
            adj[fparent[j]].push_back({j, fweight(j)});
        }
        ball_.assign(n, {});
        std::vector<std::pair<int, double>> stack;
        std::vector<int> seen(n, -1);
        for (int j = 0; j < n; ++j) {
            auto& ball = ball_[position_[(fstart + j) % n]];
            stack.assign(1, {j, 0.0});
            seen[j] = j;
            while (!stack.empty()) {
                auto [v, d] = stack.back();
                stack.pop_back();
                if (v != j) ball.push_back(position_[(fstart + v) % n]);
                for (auto [w, len] : adj[v]) {
                    if (seen[w] == j || d + len >= delta_) continue;
                    seen[w] = j;
                    stack.push_back({w, d + len});
                }
            }
        }
    }
}

int ChainRelaxation::node(int t) const {
    if (t < 0 || t > n_) throw ParameterError("chain relaxation: grid index out of range");
    return position_[t % n_];
}

void ChainRelaxation::transform(std::vector<double>& best) const {
    for (int id = n_ - 1; id >= 1; --id) {
        double via = best[id] + weight_[id];
        if (via < best[parent_[id]]) best[parent_[id]] = via;
    }
    for (int id = 1; id < n_; ++id) {
        double via = best[parent_[id]] + weight_[id];
        if (via < best[id]) best[id] = via;
    }
}

void ChainRelaxation::glue(const std::vector<double>& in, std::vector<double>& out) const {
    if (classes_) {
        std::vector<double> class_min(class_count_, kInf);
        for (int id = 0; id < n_; ++id)
            class_min[class_of_[id]] = std::min(class_min[class_of_[id]], in[id]);
        for (int id = 0; id < n_; ++id) out[id] = class_min[class_of_[id]];
    } else {
        for (int id = 0; id < n_; ++id) {
            double b = in[id];
            for (int u : ball_[id]) b = std::min(b, in[u]);
            out[id] = b;
        }
    }
}

std::vector<double> ChainRelaxation::distances_after(int s, int k) const {
    if (k < 1) throw ParameterError("chain relaxation: k must be >= 1");
    std::vector<double> best(n_, kInf), glued(n_);
    best[node(s)] = 0.0;
    transform(best);
    for (int round = 2; round <= k; ++round) {
        glue(best, glued);
        transform(glued);
        best.swap(glued);
    }
    std::vector<double> out(n_);
    for (int t = 0; t < n_; ++t) out[t] = best[position_[t]];
    return out;
}

ChainRelaxation::Row ChainRelaxation::relax_from(int s, int k_max, double tolerance) const {
    if (k_max < 1) throw ParameterError("chain relaxation: k_max must be >= 1");
    Row row;
    std::vector<double> best(n_, kInf), glued(n_);
    best[node(s)] = 0.0;
    transform(best);
    row.rounds = 1;
    row.converged = false;
    const double threshold = tolerance * label_range_;
    while (row.rounds < k_max) {
        glue(best, glued);
        transform(glued);
        double change = 0.0;
        for (int id = 0; id < n_; ++id) change = std::max(change, best[id] - glued[id]);
        best.swap(glued);
        ++row.rounds;
        row.last_change = change;
        if (change <= threshold) {
            row.converged = true;
            break;
        }
    }
    row.dist.resize(n_);
    for (int t = 0; t < n_; ++t) row.dist[t] = best[position_[t]];
    return row;
}

double ChainRelaxation::chain_dist(int k, int s, int t) const {
    return distances_after(s, k)[t % n_];
}

double ChainRelaxation::dg(int s, int t) const { return chain_dist(1, s, t); }

std::vector<int> select_sample(const ContourPair& h, int m) {
    if (m < 1) throw ParameterError("select_sample: sample size must be >= 1");
    const int n = h.n;
    std::vector<int> pts;
    if (m >= n) {
        for (int i = 0; i < n; ++i) pts.push_back(i);
        return pts;
    }
    for (int i = 0; i < m; ++i)
        pts.push_back(static_cast<int>(static_cast<long long>(i) * n / m));
    const int forced[2] = {first_argmin(h.f) % n, first_argmin(h.g) % n};
    for (int idx = 0; idx < 2; ++idx) {
        int want = forced[idx];
        if (std::find(pts.begin(), pts.end(), want) != pts.end()) continue;
        int best = -1;
        for (int i = 0; i < m; ++i) {
            if (idx == 1 && pts[i] == forced[0]) continue;
            if (best < 0 || std::abs(pts[i] - want) < std::abs(pts[best] - want)) best = i;
        }
        pts[best] = want;
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

DistanceMatrix sphere_matrix(const ContourPair& h, const std::vector<int>& sample,
                             const RelaxationOptions& options, SphereBuildInfo* info) {
    if (sample.empty()) throw ParameterError("sphere_matrix: empty sample");
    if (options.k_max < 1) throw ParameterError("sphere_matrix: k_max must be >= 1");
    ChainRelaxation relax(h, options.delta);
    DistanceMatrix d;
    d.m = static_cast<int>(sample.size());
    d.points = sample;
    d.values.assign(static_cast<std::size_t>(d.m) * d.m, 0.0);
    std::vector<int> rounds(d.m);
    std::vector<char> converged(d.m);
    std::vector<double> change(d.m);
    parallel_for(static_cast<std::size_t>(d.m), [&](std::size_t i) {
        auto row = relax.relax_from(sample[i], options.k_max, options.tolerance);
        for (int j = 0; j < d.m; ++j) d(static_cast<int>(i), j) = row.dist[sample[j] % h.n];
        rounds[i] = row.rounds;
        converged[i] = row.converged || d.m == 1;
        change[i] = row.last_change;
    });
    for (int i = 0; i < d.m; ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < d.m; ++j) {
            double v = std::min(d(i, j), d(j, i));
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    if (info) {
        info->rounds = *std::max_element(rounds.begin(), rounds.end());
        info->converged = std::all_of(converged.begin(), converged.end(), [](char c) { return c; });
        info->last_change = *std::max_element(change.begin(), change.end());
    }
    return d;
}

double DistanceMatrix::max_triangle_violation() const {
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double dij = (*this)(i, j);
            for (int k = 0; k < m; ++k) worst = std::max(worst, dij - (*this)(i, k) - (*this)(k, j));
        }
    return worst;
}

double DistanceMatrix::diameter() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

MarkedSphereSample assemble_marked(const ContourPair& h, DistanceMatrix dist, bool with_epsilon) {
    const int n = h.n;
    auto find = [&](int grid) {
        for (int i = 0; i < dist.m; ++i)
            if (dist.points[i] % n == grid % n) return i;
        throw ParameterError("assemble_marked: sample lacks marked grid index " +
                             std::to_string(grid));
    };
    MarkedSphereSample s;
    s.i0 = find(first_argmin(h.f));
    s.i1 = find(first_argmin(h.g));
    s.mass.assign(dist.m, 1.0 / dist.m);
    if (with_epsilon) s.epsilon = marks(h).epsilon;
    s.dist = std::move(dist);
    return s;
}

}  // namespace bsphere
