#include "bsphere/cvs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <string>

#include "bsphere/errors.hpp"
#include "bsphere/parallel.hpp"
#include "bsphere/rng.hpp"

namespace bsphere::cvs {

LabeledPlaneTree tree_from_dyck(const std::vector<bool>& dyck, const std::vector<int>& increments) {
    LabeledPlaneTree t;
    t.parent.push_back(-1);
    t.children.emplace_back();
    t.label.push_back(0);
    int current = 0;
    std::size_t edge = 0;
    for (bool up : dyck) {
        if (up) {
            if (edge >= increments.size()) throw StructuralError("tree_from_dyck: too few increments");
            int child = static_cast<int>(t.parent.size());
            t.parent.push_back(current);
            t.children.emplace_back();
            t.children[current].push_back(child);
            t.label.push_back(t.label[current] + increments[edge++]);
            current = child;
        } else {
            if (current == 0) throw StructuralError("tree_from_dyck: word is not a Dyck path");
            current = t.parent[current];
        }
    }
    if (current != 0) throw StructuralError("tree_from_dyck: word does not return to the root");
    return t;
}

void validate(const LabeledPlaneTree& t) {
    const int v = static_cast<int>(t.parent.size());
    if (v < 2 || static_cast<int>(t.children.size()) != v || static_cast<int>(t.label.size()) != v)
        throw StructuralError("tree: inconsistent sizes or no edges");
    if (t.parent[0] != -1 || t.label[0] != 0) throw StructuralError("tree: root must have no parent and label 0");
    // Preorder numbering: a DFS over the child lists visits 0, 1, 2, ...
    int expected = 0;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (u != expected++) throw StructuralError("tree: vertices are not in preorder");
        for (auto it = t.children[u].rbegin(); it != t.children[u].rend(); ++it) {
            int c = *it;
            if (c <= 0 || c >= v || t.parent[c] != u) throw StructuralError("tree: parent/child mismatch");
            if (std::abs(t.label[c] - t.label[u]) > 1) throw StructuralError("tree: label jump exceeds 1");
            stack.push_back(c);
        }
    }
    if (expected != v) throw StructuralError("tree: not connected");
}

LabeledPlaneTree mirror(const LabeledPlaneTree& t) {
    std::vector<bool> dyck;
    std::vector<int> inc;
    std::function<void(int)> walk = [&](int u) {
        for (auto it = t.children[u].rbegin(); it != t.children[u].rend(); ++it) {
            dyck.push_back(true);
            inc.push_back(t.label[*it] - t.label[u]);
            walk(*it);
            dyck.push_back(false);
        }
    };
    walk(0);
    return tree_from_dyck(dyck, inc);
}

std::vector<int> Quadrangulation::vertex_of() const {
    std::vector<int> id(half_edges.size(), -1);
    int count = 0;
    for (std::size_t h = 0; h < half_edges.size(); ++h) {
        if (id[h] >= 0) continue;
        int x = static_cast<int>(h);
        while (id[x] < 0) {
            id[x] = count;
            x = half_edges[x].next;
        }
        ++count;
    }
    return id;
}

int Quadrangulation::vertex_count() const {
    auto id = vertex_of();
    return id.empty() ? 0 : *std::max_element(id.begin(), id.end()) + 1;
}

std::vector<std::vector<int>> Quadrangulation::faces() const {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(half_edges.size(), 0);
    for (std::size_t h = 0; h < half_edges.size(); ++h) {
        if (seen[h]) continue;
        std::vector<int> face;
        int x = static_cast<int>(h);
        while (!seen[x]) {
            seen[x] = 1;
            face.push_back(x);
            x = half_edges[half_edges[x].opp].next;
        }
        out.push_back(std::move(face));
    }
    return out;
}

namespace {

void check_permutations(const Quadrangulation& q) {
    const int e2 = q.half_edge_count();
    if (e2 == 0 || e2 % 2) throw StructuralError("map: half-edge count must be even and positive");
    std::vector<char> hit(e2, 0);
    for (int h = 0; h < e2; ++h) {
        const auto& he = q.half_edges[h];
        if (he.opp < 0 || he.opp >= e2 || he.opp == h || q.half_edges[he.opp].opp != h)
            throw StructuralError("map: opp is not a fixed-point-free involution");
        if (he.next < 0 || he.next >= e2 || hit[he.next]++)
            throw StructuralError("map: next is not a permutation");
    }
    if (q.root < 0 || q.root >= e2) throw StructuralError("map: root half-edge out of range");
}

}  // namespace

std::vector<int> bfs_labels(const Quadrangulation& q, int v) {
    auto vertex = q.vertex_of();
    const int nv = q.vertex_count();
    if (v < 0 || v >= nv) throw ParameterError("bfs_labels: vertex out of range");
    std::vector<std::vector<int>> adj(nv);
    for (int h = 0; h < q.half_edge_count(); ++h)
        adj[vertex[h]].push_back(vertex[q.half_edges[h].opp]);
    std::vector<int> dist(nv, -1);
    std::queue<int> queue;
    dist[v] = 0;
    queue.push(v);
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop();
        for (int w : adj[u])
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                queue.push(w);
            }
    }
    return dist;
}

void validate(const Quadrangulation& q) {
    check_permutations(q);
    const int nv = q.vertex_count();
    if (q.pointed < 0 || q.pointed >= nv) throw StructuralError("map: pointed vertex out of range");
    auto faces = q.faces();
    for (const auto& f : faces)
        if (f.size() != 4) throw StructuralError("map: face of degree " + std::to_string(f.size()));
    const int edges = q.half_edge_count() / 2;
    if (nv - edges + static_cast<int>(faces.size()) != 2) throw StructuralError("map: not planar or not connected");
    auto dist = bfs_labels(q, 0);
    if (std::count(dist.begin(), dist.end(), -1)) throw StructuralError("map: not connected");
    auto vertex = q.vertex_of();
    for (int h = 0; h < q.half_edge_count(); ++h)
        if ((dist[vertex[h]] + dist[vertex[q.half_edges[h].opp]]) % 2 == 0)
            throw StructuralError("map: 1-skeleton is not bipartite");
}

std::vector<int> canonical_code(const Quadrangulation& q) {
    const int e2 = q.half_edge_count();
    std::vector<int> fresh(e2, -1), old;
    old.reserve(e2);
    auto visit = [&](int h) {
        if (fresh[h] < 0) {
            fresh[h] = static_cast<int>(old.size());
            old.push_back(h);
        }
    };
    visit(q.root);
    for (std::size_t i = 0; i < old.size(); ++i) {
        visit(q.half_edges[old[i]].next);
        visit(q.half_edges[old[i]].opp);
    }
    std::vector<int> code;
    code.reserve(2 * old.size() + 2);
    code.push_back(static_cast<int>(old.size()));
    for (int h : old) {
        code.push_back(fresh[q.half_edges[h].next]);
        code.push_back(fresh[q.half_edges[h].opp]);
    }
    auto vertex = q.vertex_of();
    int pointed = e2;
    for (int h = 0; h < e2; ++h)
        if (vertex[h] == q.pointed && fresh[h] >= 0) pointed = std::min(pointed, fresh[h]);
    code.push_back(pointed);
    return code;
}

Quadrangulation mirror(const Quadrangulation& q) {
    Quadrangulation m = q;
    for (int h = 0; h < q.half_edge_count(); ++h) m.half_edges[q.half_edges[h].next].next = h;
    return m;
}

Quadrangulation cvs_forward(const LabeledPlaneTree& t, int sign) {
    validate(t);
    if (sign != 1 && sign != -1) throw ParameterError("cvs_forward: sign must be +1 or -1");
    const int nv = static_cast<int>(t.parent.size());
    const int n = nv - 1;
    const int corners = 2 * n;

    // Contour corners and the corner lists of each vertex, in visit order.
    std::vector<int> corner_vertex;
    std::vector<std::vector<int>> corner_ids(nv);
    corner_vertex.reserve(corners);
    std::function<void(int)> dfs = [&](int v) {
        corner_ids[v].push_back(static_cast<int>(corner_vertex.size()));
        corner_vertex.push_back(v);
        const int k = static_cast<int>(t.children[v].size());
        for (int j = 0; j < k; ++j) {
            dfs(t.children[v][j]);
            if (v != 0 || j + 1 < k) {
                corner_ids[v].push_back(static_cast<int>(corner_vertex.size()));
                corner_vertex.push_back(v);
            }
        }
    };
    dfs(0);

    // Successor of each corner: next corner (cyclically) with label one less.
    const int lmin = *std::min_element(t.label.begin(), t.label.end());
    const int lmax = *std::max_element(t.label.begin(), t.label.end());
    std::vector<int> next_with(lmax - lmin + 2, -1);
    std::vector<int> succ(corners, -1);
    for (int i = 2 * corners - 1; i >= 0; --i) {
        const int c = i % corners;
        const int l = t.label[corner_vertex[c]];
        if (i < corners) succ[c] = l == lmin ? -1 : next_with[l - 1 - lmin];
        next_with[l - lmin] = c;
    }

    // Arc of corner c: half-edge 2c leaves the corner, 2c+1 enters the target.
    Quadrangulation q;
    q.half_edges.resize(2 * corners);
    for (int c = 0; c < corners; ++c) {
        q.half_edges[2 * c].opp = 2 * c + 1;
        q.half_edges[2 * c + 1].opp = 2 * c;
    }
    std::vector<std::vector<int>> incoming(corners);
    std::vector<int> spokes;
    for (int c = 0; c < corners; ++c) {
        if (succ[c] < 0) spokes.push_back(2 * c + 1);
        else incoming[succ[c]].push_back(c);
    }

    auto close_cycle = [&](const std::vector<int>& cycle) {
        for (std::size_t i = 0; i < cycle.size(); ++i)
            q.half_edges[cycle[i]].next = cycle[(i + 1) % cycle.size()];
    };
    // Around a tree vertex: parent edge, corner 0, child 1, corner 1, ...;
    // inside a corner, entering arcs from the nearest source backwards, then
    // the leaving arc.
    for (int v = 0; v < nv; ++v) {
        std::vector<int> cycle;
        for (int c : corner_ids[v]) {
            auto& in = incoming[c];
            std::sort(in.begin(), in.end(), [&](int a, int b) {
                return (a - c + corners) % corners > (b - c + corners) % corners;
            });
            for (int src : in) cycle.push_back(2 * src + 1);
            cycle.push_back(2 * c);
        }
        close_cycle(cycle);
    }
    std::reverse(spokes.begin(), spokes.end());
    close_cycle(spokes);

    q.root = sign > 0 ? 0 : 1;
    q.pointed = q.vertex_of()[spokes.front()];
    return q;
}

InverseResult cvs_inverse(const Quadrangulation& q) {
    validate(q);
    const int e2 = q.half_edge_count();
    const auto vertex = q.vertex_of();
    const int nv = q.vertex_count();
    const auto dist = bfs_labels(q, q.pointed);
    auto tail = [&](int h) { return vertex[h]; };
    auto head = [&](int h) { return vertex[q.half_edges[h].opp]; };

    InverseResult out;
    int root_out = q.root;
    if (dist[tail(q.root)] > dist[head(q.root)]) {
        out.sign = 1;
    } else {
        out.sign = -1;
        root_out = q.half_edges[q.root].opp;
    }
    const int root_vertex = tail(root_out);

    // tree_at[x] = other endpoint of the tree edge sitting in the corner
    // between half-edge x and next(x), or -1.
    std::vector<int> tree_at(e2, -1);
    for (const auto& face : q.faces()) {
        int ends[2], found = 0;
        for (int h : face) {
            // Entering the corner at head(h) by a label-increasing step.
            if (dist[head(h)] != dist[tail(h)] + 1) continue;
            if (found == 2) throw StructuralError("cvs_inverse: face with more than one tree edge");
            ends[found++] = q.half_edges[h].opp;
        }
        if (found != 2) throw StructuralError("cvs_inverse: face without a tree edge");
        tree_at[ends[0]] = tail(ends[1]);
        tree_at[ends[1]] = tail(ends[0]);
    }

    // Tree edges around each vertex in rotation order, keyed by corner.
    std::vector<std::vector<int>> around(nv);  // corner half-edges x
    for (int h = 0; h < e2; ++h) {
        if (tree_at[h] < 0 || !around[vertex[h]].empty()) continue;
        int x = h;
        do {
            if (tree_at[x] >= 0) around[vertex[x]].push_back(x);
            x = q.half_edges[x].next;
        } while (x != h);
    }
    auto start_index = [&](int v, int corner) {
        const auto& list = around[v];
        return static_cast<int>(std::find(list.begin(), list.end(), corner) - list.begin());
    };
    // Corner half-edge at w of the tree edge coming from corner x at v.
    auto partner = [&](int x) {
        const int v = vertex[x], w = tree_at[x];
        for (int y : around[w])
            if (tree_at[y] == v) {
                // Among parallel candidates pick the one lying in the same face.
                int h = q.half_edges[x].next;
                for (int step = 0; step < 4; ++step) {
                    if (h == q.half_edges[y].next) return y;
                    h = q.half_edges[q.half_edges[h].opp].next;
                }
            }
        throw StructuralError("cvs_inverse: unmatched tree edge");
    };

    std::vector<bool> dyck;
    std::vector<int> inc;
    std::vector<char> placed(nv, 0);
    std::function<void(int, int)> walk = [&](int v, int entry) {
        placed[v] = 1;
        const auto& list = around[v];
        const int k = static_cast<int>(list.size());
        const int first = start_index(v, entry);
        for (int step = (v == root_vertex ? 0 : 1); step < k; ++step) {
            const int x = list[(first + step) % k];
            const int w = tree_at[x];
            if (placed[w]) throw StructuralError("cvs_inverse: tree edges contain a cycle");
            dyck.push_back(true);
            inc.push_back(dist[w] - dist[v]);
            walk(w, partner(x));
            dyck.push_back(false);
        }
    };
    // The first child of the root sits in the corner right after root_out.
    if (tree_at[root_out] < 0) throw StructuralError("cvs_inverse: no tree edge after the root arc");
    walk(root_vertex, root_out);
    out.tree = tree_from_dyck(dyck, inc);
    if (out.tree.n_edges() * 2 != e2 / 2) throw StructuralError("cvs_inverse: tree does not span the map");
    return out;
}

std::uint64_t catalan(int n) {
    std::uint64_t c = 1;
    for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
    return c;
}

std::vector<std::vector<bool>> dyck_words(int n_edges) {
    std::vector<std::vector<bool>> out;
    std::vector<bool> word;
    std::function<void(int, int)> grow = [&](int ups, int height) {
        if (static_cast<int>(word.size()) == 2 * n_edges) {
            out.push_back(word);
            return;
        }
        if (ups < n_edges) {
            word.push_back(true);
            grow(ups + 1, height + 1);
            word.pop_back();
        }
        if (height > 0) {
            word.push_back(false);
            grow(ups, height - 1);
            word.pop_back();
        }
    };
    grow(0, 0);
    return out;
}

std::vector<LabeledPlaneTree> enumerate_trees(int n_edges) {
    if (n_edges < 1) throw ParameterError("enumerate_trees: n_edges must be >= 1");
    std::vector<LabeledPlaneTree> out;
    std::vector<int> inc(n_edges, -1);
    for (const auto& word : dyck_words(n_edges)) {
        std::fill(inc.begin(), inc.end(), -1);
        for (;;) {
            out.push_back(tree_from_dyck(word, inc));
            int i = 0;
            while (i < n_edges && inc[i] == 1) inc[i++] = -1;
            if (i == n_edges) break;
            ++inc[i];
        }
    }
    return out;
}

std::vector<Quadrangulation> enumerate_quadrangulations(int n_faces) {
    if (n_faces < 1) throw ParameterError("enumerate_quadrangulations: n_faces must be >= 1");
    const int e2 = 4 * n_faces;
    std::vector<int> alpha(e2, -1), sigma(e2), cycle_id(e2);
    std::map<std::vector<int>, Quadrangulation> found;
    auto face_next = [](int h) { return (h & ~3) | ((h + 1) & 3); };

    auto consider = [&]() {
        // face permutation phi = sigma o alpha, so sigma = phi o alpha.
        for (int h = 0; h < e2; ++h) sigma[h] = face_next(alpha[h]);
        std::fill(cycle_id.begin(), cycle_id.end(), -1);
        int vertices = 0;
        for (int h = 0; h < e2; ++h) {
            if (cycle_id[h] >= 0) continue;
            for (int x = h; cycle_id[x] < 0; x = sigma[x]) cycle_id[x] = vertices;
            ++vertices;
        }
        if (vertices != n_faces + 2) return;
        Quadrangulation q;
        q.half_edges.resize(e2);
        for (int h = 0; h < e2; ++h) q.half_edges[h] = {alpha[h], sigma[h]};
        auto reach = bfs_labels(q, 0);
        if (std::count(reach.begin(), reach.end(), -1)) return;
        const int nv = q.vertex_count();
        for (int r = 0; r < e2; ++r) {
            q.root = r;
            q.pointed = 0;
            auto code = canonical_code(q);
            if (found.count(code)) continue;  // rooted map already seen
            for (int p = 0; p < nv; ++p) {
                q.pointed = p;
                found.emplace(canonical_code(q), q);
            }
        }
    };
    std::function<void()> match = [&]() {
        int first = static_cast<int>(std::find(alpha.begin(), alpha.end(), -1) - alpha.begin());
        if (first == e2) {
            consider();
            return;
        }
        for (int other = first + 1; other < e2; ++other) {
            if (alpha[other] >= 0) continue;
            alpha[first] = other;
            alpha[other] = first;
            match();
            alpha[first] = alpha[other] = -1;
        }
    };
    match();
    std::vector<Quadrangulation> out;
    out.reserve(found.size());
    for (auto& [code, q] : found) out.push_back(q);
    return out;
}

LabeledPlaneTree sample_uniform(int n_edges, std::uint64_t seed) {
    if (n_edges < 1) throw ParameterError("sample_uniform: n_edges must be >= 1");
    Rng rng = make_rng(seed, 7);
    std::vector<int> steps(2 * n_edges + 1, -1);
    std::fill(steps.begin(), steps.begin() + n_edges, 1);
    for (int i = 2 * n_edges; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(steps[i], steps[pick(rng)]);
    }
    int sum = 0, best = 0, tau = 0;
    for (int i = 0; i < 2 * n_edges + 1; ++i) {
        sum += steps[i];
        if (sum < best) {
            best = sum;
            tau = i + 1;
        }
    }
    std::vector<bool> dyck(2 * n_edges);
    for (int i = 0; i < 2 * n_edges; ++i) dyck[i] = steps[(tau + i) % (2 * n_edges + 1)] > 0;
    std::uniform_int_distribution<int> label_step(-1, 1);
    std::vector<int> inc(n_edges);
    for (int& x : inc) x = label_step(rng);
    return tree_from_dyck(dyck, inc);
}

std::vector<double> scaling_profile(int n_edges, const std::vector<std::uint64_t>& seeds) {
    if (n_edges < 1) throw ParameterError("scaling_profile: n_edges must be >= 1");
    std::vector<double> out(seeds.size());
    const double scale = std::pow(static_cast<double>(n_edges), 0.25);
    parallel_for(seeds.size(), [&](std::size_t i) {
        auto tree = sample_uniform(n_edges, seeds[i]);
        auto q = cvs_forward(tree, 1);
        auto d = bfs_labels(q, q.pointed);
        out[i] = d[q.vertex_of()[q.root]] / scale;
    });
    return out;
}

}  // namespace bsphere::cvs
