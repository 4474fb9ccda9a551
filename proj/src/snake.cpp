#include "bsphere/snake.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsphere/errors.hpp"
#include "bsphere/rng.hpp"

namespace bsphere {

std::vector<double> sample_excursion(int n, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0)
        throw ParameterError("sample_excursion: n must be even and >= 2, got " + std::to_string(n));
    const int k = n / 2;
    // k up-steps and k+1 down-steps: a walk bridge from 0 to -1. Exactly one
    // cyclic rotation stays >= 0 before its final step (cycle lemma), so the
    // rotated walk minus its last step is a uniform Dyck path.
    std::vector<int> steps(2 * k + 1, -1);
    std::fill(steps.begin(), steps.begin() + k, 1);
    Rng rng = make_rng(seed, 0);
    for (int i = 2 * k; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(steps[i], steps[pick(rng)]);
    }
    int sum = 0, best = 0, tau = 0;
    for (int i = 0; i < 2 * k + 1; ++i) {
        sum += steps[i];
        if (sum < best) {
            best = sum;
            tau = i + 1;
        }
    }
    std::vector<double> f(n + 1, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    int height = 0;
    for (int i = 0; i < n; ++i) {
        height += steps[(tau + i) % (2 * k + 1)];
        f[i + 1] = height * scale;
    }
    f[n] = 0.0;
    return f;
}

std::vector<double> sample_labels(std::span<const double> f, std::uint64_t seed) {
    if (f.size() < 2) throw ParameterError("sample_labels: contour needs at least two values");
    const std::size_t n = f.size() - 1;
    Rng rng = make_rng(seed, 1);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Stack of ancestors of the current point: (height, label).
    struct Node {
        double height;
        double label;
    };
    std::vector<Node> stack{{f[0], 0.0}};
    std::vector<double> g(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double h = f[i];
        if (h > stack.back().height) {
            double fresh = h - stack.back().height;
            stack.push_back({h, stack.back().label + std::sqrt(fresh) * normal(rng)});
        } else if (h < stack.back().height) {
            Node popped = stack.back();
            while (!stack.empty() && stack.back().height > h) {
                popped = stack.back();
                stack.pop_back();
            }
            if (stack.empty() || stack.back().height < h) {
                // The return lands inside an edge: bridge-interpolate between
                // the surviving ancestor (or a virtual root) and the popped node.
                double lo_h = stack.empty() ? h : stack.back().height;
                double lo_l = stack.empty() ? popped.label : stack.back().label;
                double span_h = popped.height - lo_h;
                double theta = span_h > 0 ? (h - lo_h) / span_h : 0.0;
                double mean = lo_l + theta * (popped.label - lo_l);
                double var = theta * (1.0 - theta) * span_h;
                stack.push_back({h, mean + std::sqrt(std::max(var, 0.0)) * normal(rng)});
            }
        }
        g[i] = stack.back().label;
    }
    return g;
}

ContourPair sample_snake(int n, std::uint64_t seed) {
    ContourPair h;
    h.n = n;
    h.seed = seed;
    h.f = sample_excursion(n, sub_seed(seed, 100));
    h.g = sample_labels(h.f, sub_seed(seed, 101));
    h.g[0] = 0.0;
    return h;
}

int first_argmin(std::span<const double> v) {
    return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
}

int last_argmin(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] <= v[best]) best = i;
    return best;
}

SnakeMarks marks(const ContourPair& h) {
    SnakeMarks m;
    m.s_star = first_argmin(h.g);
    m.epsilon = (2 * static_cast<long>(m.s_star) <= h.n) ? 1 : -1;
    return m;
}

ContourPair reverse(const ContourPair& h) {
    ContourPair r = h;
    std::reverse(r.f.begin(), r.f.end());
    std::reverse(r.g.begin(), r.g.end());
    return r;
}

void validate(const ContourPair& h) {
    if (h.n < 1) throw ParameterError("snake: n must be positive");
    const auto size = static_cast<std::size_t>(h.n) + 1;
    if (h.f.size() != size || h.g.size() != size)
        throw ParameterError("snake: f and g must have n+1 values");
    if (h.f.front() != 0.0 || h.f.back() != 0.0 || h.g.front() != 0.0 || h.g.back() != 0.0)
        throw ParameterError("snake: f and g must vanish at both endpoints");
    for (double v : h.f)
        if (!(v >= 0.0)) throw ParameterError("snake: f must be nonnegative and finite");
    for (double v : h.g)
        if (!std::isfinite(v)) throw ParameterError("snake: g must be finite");
}

}  // namespace bsphere
