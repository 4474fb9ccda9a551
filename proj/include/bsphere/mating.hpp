#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bsphere/snake.hpp"

namespace bsphere {

// Symmetric pseudometric values on sampled grid points, row-major m x m.
struct DistanceMatrix {
    int m = 0;
    std::vector<int> points;
    std::vector<double> values;

    double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * m + j]; }
    double& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * m + j]; }

    // Largest triangle-inequality violation over all triples (O(m^3)).
    double max_triangle_violation() const;
    double diameter() const;
};

struct SphereBuildInfo {
    int rounds = 0;          // largest number of relaxation rounds used by a row
    bool converged = true;   // every row reached the threshold before k_max
    double last_change = 0;  // largest change seen in the final round of any row
};

// (X, d, mu, x0, x1) on a finite sample, optionally with the orientation bit.
struct MarkedSphereSample {
    DistanceMatrix dist;
    std::vector<double> mass;
    int i0 = 0;
    int i1 = 0;
    std::optional<int> epsilon;
};

struct RelaxationOptions {
    int k_max = 50;
    // Gluing threshold on d_f; negative selects the default, half the
    // smallest positive contour step, which glues exactly the d_f = 0 pairs
    // of a lattice contour.
    double delta = -1.0;
    // Stop once the largest change of a row between rounds is at most
    // tolerance * (max g - min g).
    double tolerance = 1e-6;
};

// Chains s = s1, t1, ..., sk, tk = t with d_f(t_j, s_{j+1}) < delta,
// minimized over grid times by k rounds of relaxation (t_j = s_{j+1} is
// always allowed, so delta = 0 means no gluing at all). Each round is a
// gluing step followed by an exact distance transform on the Cartesian tree
// of g, whose path metric is d_g on the grid. Immutable after construction.
class ChainRelaxation {
public:
    explicit ChainRelaxation(const ContourPair& h, double delta = -1.0);

    int n() const { return n_; }
    double delta() const { return delta_; }
    double label_range() const { return label_range_; }

    struct Row {
        std::vector<double> dist;  // indexed by grid time 0..n-1 (n is time 0)
        int rounds = 0;
        bool converged = true;
        double last_change = 0;
    };

    // Distances from grid time s after exactly k rounds (k = 1 gives d_g).
    std::vector<double> distances_after(int s, int k) const;
    // Rounds until the largest change is within tolerance, at most k_max.
    Row relax_from(int s, int k_max, double tolerance) const;

    double chain_dist(int k, int s, int t) const;
    double dg(int s, int t) const;

private:
    void transform(std::vector<double>& best) const;
    void glue(const std::vector<double>& in, std::vector<double>& out) const;
    int node(int t) const;

    int n_ = 0;
    double delta_ = 0;
    double label_range_ = 0;
    // Cartesian tree of g rotated to its first argmin, nodes in BFS order.
    std::vector<int> order_;     // BFS id -> grid time
    std::vector<int> position_;  // grid time -> BFS id
    std::vector<int> parent_;    // BFS id -> parent BFS id (root: -1)
    std::vector<double> weight_; // BFS id -> g difference to parent
    // Glue structure in BFS ids: exact classes when transitive, else balls.
    bool classes_ = true;
    std::vector<int> class_of_;
    int class_count_ = 0;
    std::vector<std::vector<int>> ball_;
};

double default_delta(const ContourPair& h);

// Uniform thinning of [0, n) to m indices with argmin f and argmin g forced in.
std::vector<int> select_sample(const ContourPair& h, int m);

DistanceMatrix sphere_matrix(const ContourPair& h, const std::vector<int>& sample,
                             const RelaxationOptions& options = {},
                             SphereBuildInfo* info = nullptr);

MarkedSphereSample assemble_marked(const ContourPair& h, DistanceMatrix dist,
                                   bool with_epsilon = true);

}  // namespace bsphere
