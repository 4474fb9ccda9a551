#pragma once

#include <cstdint>
#include <vector>

#include "bsphere/mating.hpp"

namespace bsphere {

// Classifier and separation thresholds. Negative entries select defaults
// derived from the sample (see resolve_params).
struct InverseParams {
    double tol_geo = -1;     // detour tolerance for "lies on a geodesic"
    double sep_radius = -1;  // transverse gap separating two geodesics
    double eps_graph = -1;   // edge length of the neighborhood graph
    double eta = -1;         // half-width of the band removed around a loop
    double macro_mass = 0.02;
    double cover_quantile = 0.9;  // quantile of nearest-neighbor distances used as r_cov
    double r_cov = 0;        // filled by resolve_params
};

// Defaults: r_cov = cover_quantile-quantile of min_{j != i} d(i,j) (the
// maximum is dominated by a few isolated points); tol_geo = 1e-9 * diameter;
// sep_radius = 5 r_cov; eps_graph = max(3 r_cov, 1.05 * the smallest
// length connecting the sample); eta = 2 r_cov.
InverseParams resolve_params(const MarkedSphereSample& s, InverseParams p = {});

struct LocusClassification {
    std::vector<char> in_cut;
    std::vector<char> in_geo;
    std::vector<char> in_plain;
    std::vector<double> cut_margin;  // transverse gap minus sep_radius
    std::vector<double> geo_margin;
    InverseParams params;
};

struct LoopRegions {
    std::vector<int> loop;
    std::vector<int> region_a;  // larger of the two macroscopic regions
    std::vector<int> region_b;
    std::vector<int> excluded;  // band around the loop and dust components
    double mass_a = 0;
    double mass_b = 0;
    double mass_excluded = 0;
};

struct RecoveredSnake {
    ContourPair h;                 // f_hat, g_hat on the uniform grid of resolution m
    std::vector<double> time_of;   // per sample point
    std::vector<double> contour;   // per sample point, NaN where the branch was too sparse
    double s_star_hat = 0;
    bool low_confidence_orientation = false;
    int loop_failures = 0;         // points whose loop did not split in two
    int branch_failures = 0;       // points with too sparse a branch
    double max_nesting_violation = 0;
};

// Every operation reads only (dist, mass, i0, i1, epsilon); the sample's
// grid indices are never consulted. Construction validates the input
// (m >= 20, i0 != i1, mass sums to 1) and caches the labels, the geodesic
// relation and the neighborhood graph.
class SphereInverse {
public:
    explicit SphereInverse(const MarkedSphereSample& s, InverseParams p = {});

    const MarkedSphereSample& sample() const { return s_; }
    const InverseParams& params() const { return p_; }
    int m() const { return m_; }

    const std::vector<double>& labels() const { return label_; }
    // y lies on a geodesic from z to x1.
    bool on_geodesic(int z, int y) const { return geo_[static_cast<std::size_t>(z) * m_ + y] != 0; }

    std::vector<int> extract_geodesic(int i, int j, double tol) const;
    const LocusClassification& classification() const;
    std::vector<int> branch_between(int x, int y) const;
    LoopRegions jordan_loop(int x) const;
    double recover_orientation_time(bool* low_confidence = nullptr) const;
    std::vector<double> recover_parametrization(RecoveredSnake* diagnostics = nullptr) const;
    double recover_contour_value(int x) const;
    RecoveredSnake phi() const;

    // Same sample and caches with another orientation bit.
    SphereInverse with_epsilon(int epsilon) const;

    // Component of each point once the two geodesics from cut point z to
    // x1 are removed (-1 inside the removed band).
    const std::vector<int>& separation(int z) const;

private:
    std::vector<int> loop_components(const std::vector<int>& loop) const;
    std::vector<int> geodesic_set(int z) const;
    void ensure_separations() const;

    MarkedSphereSample s_;
    InverseParams p_;
    int m_ = 0;
    std::vector<double> label_;
    std::vector<char> geo_;
    std::vector<std::vector<int>> adj_;

    mutable bool classified_ = false;
    mutable LocusClassification cls_;
    mutable bool separated_ = false;
    mutable std::vector<std::vector<int>> sep_;  // per point, empty unless in_cut
};

std::vector<double> recover_labels(const MarkedSphereSample& s);
std::vector<int> extract_geodesic(const MarkedSphereSample& s, int i, int j, double tol);
LocusClassification classify_cut_locus(const MarkedSphereSample& s, const InverseParams& p = {});
std::vector<int> branch_between(const MarkedSphereSample& s, int x, int y,
                                const InverseParams& p = {});
LoopRegions jordan_loop(const MarkedSphereSample& s, int x, const InverseParams& p = {});
double recover_orientation_time(const MarkedSphereSample& s, const InverseParams& p = {});
std::vector<double> recover_parametrization(const MarkedSphereSample& s,
                                            const InverseParams& p = {});
double recover_contour_value(const MarkedSphereSample& s, int x, const InverseParams& p = {});
RecoveredSnake phi(const MarkedSphereSample& s, const InverseParams& p = {});

// Linear interpolation of a function known at unsorted times onto the grid
// i/res, i = 0..res, with the given endpoint values.
std::vector<double> interpolate_on_grid(std::vector<double> times, std::vector<double> values,
                                        int res, double at0, double at1);

}  // namespace bsphere
