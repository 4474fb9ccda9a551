#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bsphere {

// A discretized snake h = (f, g) on the uniform grid i/n, i = 0..n.
// f is the lifetime (contour) process, g the labels carried by the tree
// coded by f.
struct ContourPair {
    int n = 0;
    std::vector<double> f;
    std::vector<double> g;
    std::uint64_t seed = 0;

    bool operator==(const ContourPair&) const = default;
};

struct SnakeMarks {
    int s_star = 0;   // first grid index attaining min(g)
    int epsilon = 1;  // +1 iff s_star / n <= 1/2
};

// Uniform Dyck path of length n (n even) rescaled by 1/sqrt(n), sampled by
// the discrete Vervaat transform of a +-1 walk bridge. f[0] = f[n] = 0 and
// f >= 0.
std::vector<double> sample_excursion(int n, std::uint64_t seed);

// Brownian labels indexed by the tree coded by f, root label 0. Visits of
// the same tree point receive bit-identical labels.
std::vector<double> sample_labels(std::span<const double> f, std::uint64_t seed);

// Excursion and labels drawn from independent sub-streams of seed.
ContourPair sample_snake(int n, std::uint64_t seed);

SnakeMarks marks(const ContourPair& h);

// Time reversal R(h) = (f(1 - .), g(1 - .)).
ContourPair reverse(const ContourPair& h);

int first_argmin(std::span<const double> v);
int last_argmin(std::span<const double> v);

// Throws ParameterError unless h lies in the snake space: sizes n+1,
// vanishing endpoints, f >= 0.
void validate(const ContourPair& h);

}  // namespace bsphere
