#pragma once

#include <cstdint>
#include <vector>

namespace bsphere::cvs {

// Plane tree with vertices numbered in preorder (root 0); children are
// listed left to right. Labels change by at most 1 along edges, root label 0.
struct LabeledPlaneTree {
    std::vector<int> parent;                  // parent[0] = -1
    std::vector<std::vector<int>> children;
    std::vector<int> label;

    int n_edges() const { return static_cast<int>(parent.size()) - 1; }
    bool operator==(const LabeledPlaneTree&) const = default;
};

// Builds a preorder-numbered tree from a Dyck word (true = step away from
// the root) and per-edge label increments in preorder of the child vertex.
LabeledPlaneTree tree_from_dyck(const std::vector<bool>& dyck, const std::vector<int>& increments);

// Throws StructuralError on a malformed tree.
void validate(const LabeledPlaneTree& t);

// Reverses every child list (mirror image), renumbering in preorder.
LabeledPlaneTree mirror(const LabeledPlaneTree& t);

struct HalfEdge {
    int opp = 0;   // involution alpha
    int next = 0;  // next half-edge around the same vertex (sigma)
    bool operator==(const HalfEdge&) const = default;
};

// Rotation system on 2E half-edges. Vertices are the cycles of next,
// numbered by first appearance when scanning half-edges in index order;
// faces are the cycles of next(opp(h)).
struct Quadrangulation {
    std::vector<HalfEdge> half_edges;
    int root = 0;
    int pointed = 0;

    int half_edge_count() const { return static_cast<int>(half_edges.size()); }
    std::vector<int> vertex_of() const;
    int vertex_count() const;
    std::vector<std::vector<int>> faces() const;
};

// Throws StructuralError unless q is a connected planar map whose faces all
// have degree 4 and whose 1-skeleton is bipartite.
void validate(const Quadrangulation& q);

// Breadth-first distances from vertex v on the 1-skeleton.
std::vector<int> bfs_labels(const Quadrangulation& q, int v);

// Relabeling-invariant code of a rooted pointed map; equal codes iff the
// maps are isomorphic as rooted pointed maps.
std::vector<int> canonical_code(const Quadrangulation& q);

// Reverses the cyclic order around every vertex.
Quadrangulation mirror(const Quadrangulation& q);

// Successor-arc construction: every corner of label l is joined to the next
// corner in contour order with label l - 1, or to the extra vertex v* when
// l is minimal. sign = +1 roots the map at the arc leaving the root corner,
// oriented away from the tree root; sign = -1 reverses it.
Quadrangulation cvs_forward(const LabeledPlaneTree& t, int sign);

struct InverseResult {
    LabeledPlaneTree tree;
    int sign = 1;
};

// Labels are distances to the pointed vertex shifted so the tree root gets
// 0; each face contributes the tree edge joining its two corners entered by
// a label-increasing step.
InverseResult cvs_inverse(const Quadrangulation& q);

std::uint64_t catalan(int n);
std::vector<std::vector<bool>> dyck_words(int n_edges);
std::vector<LabeledPlaneTree> enumerate_trees(int n_edges);

// Every rooted pointed quadrangulation with n faces, one representative per
// isomorphism class, built by gluing the sides of n squares.
std::vector<Quadrangulation> enumerate_quadrangulations(int n_faces);

// Uniform plane tree (cycle lemma on a +-1 sequence) with i.i.d. uniform
// {-1, 0, +1} edge increments.
LabeledPlaneTree sample_uniform(int n_edges, std::uint64_t seed);

// d_Q(tree root, v*) / n^(1/4) for one sampled quadrangulation per seed.
std::vector<double> scaling_profile(int n_edges, const std::vector<std::uint64_t>& seeds);

}  // namespace bsphere::cvs
