#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randmaps/errors.hpp"
#include "randmaps/plane_tree.hpp"
#include "randmaps/rng.hpp"

namespace randmaps {

// Bipartite plane tree: vertices at even depth are white, odd depth black.
// Every black vertex has exactly p-1 children; white vertices carry integer
// labels, the root label is 0, and around every black vertex the p cyclic
// label increments (parent then children, clockwise) are all >= -1 and sum
// to 0. Labels fit in 32 bits since |label| <= depth <= pn.
struct LabeledPTree {
    PlaneTree tree;
    std::int32_t p = 2;
    std::int32_t n_black = 0;
    std::vector<std::int32_t> label;  // per vertex; meaningful for white only

    bool is_white(std::int32_t v) const { return (tree.depth[v] & 1) == 0; }
    std::int32_t white_count() const { return (p - 1) * n_black + 1; }

    void validate() const;
};

// Contour/label coding of a labeled p-tree. C holds half-generations of the
// white contour sequence, L the labels, corner_vertex the visited vertices.
// All three have pn+1 entries, with positions 0 and pn both at the root.
struct ContourCoding {
    std::int32_t p = 2;
    std::int64_t n = 0;
    std::vector<std::int32_t> C;
    std::vector<std::int32_t> L;
    std::vector<std::int32_t> corner_vertex;

    std::int64_t length() const { return static_cast<std::int64_t>(C.size()) - 1; }
    void validate() const;  // throws MalformedCodingError
};

ContourCoding contour_and_labels(const LabeledPTree& theta);
LabeledPTree decode_contour(const std::vector<std::int32_t>& C,
                            const std::vector<std::int32_t>& L, std::int32_t p);
inline LabeledPTree decode_contour(const ContourCoding& coding, std::int32_t p) {
    return decode_contour(coding.C, coding.L, p);
}

// Binary serialization ("RMLT" format, documented in docs/formats.md).
std::vector<std::uint8_t> serialize_coding(const ContourCoding& coding);
ContourCoding deserialize_coding(const std::vector<std::uint8_t>& bytes);

// --- samplers ---------------------------------------------------------

enum class PTreeMethod { Auto, GaltonWatson, Exact };

// Uniform p-tree with n black vertices. The Galton-Watson path draws a
// two-type tree (white: geometric(1/p) black children; black: exactly p-1
// white children) and rejects until the black count is exactly n; the
// geometric parameter 1/p makes the chain critical and the conditioned law
// is uniform for any parameter since P(tree) depends on (p, n) only. The
// exact path draws a uniform composition for the white-reduced degree
// sequence and rotates its Lukasiewicz path (cycle lemma); it is linear
// in pn and is used automatically for large n.
PlaneTree sample_uniform_ptree(std::int32_t p, std::int64_t n, Rng& rng,
                               PTreeMethod method = PTreeMethod::Auto);

// Uniform admissible labels on a p-tree: independently per black vertex, the
// increment vector (d_0..d_{p-1}), d_i >= -1, sum 0, is uniform over its
// C(2p-1, p-1) possibilities (stars and bars).
LabeledPTree sample_admissible_labels(const PlaneTree& tree, std::int32_t p, Rng& rng);

inline LabeledPTree sample_labeled_ptree(std::int32_t p, std::int64_t n, Rng& rng,
                                         PTreeMethod method = PTreeMethod::Auto) {
    PlaneTree t = sample_uniform_ptree(p, n, rng, method);
    return sample_admissible_labels(t, p, rng);
}

// --- enumeration ------------------------------------------------------

// All p-tree shapes with n black vertices, in lexicographic order of their
// white-reduced preorder degree sequences.
std::vector<PlaneTree> enumerate_ptree_shapes(std::int32_t p, std::int64_t n,
                                              std::int64_t cap = 1 << 20);

// All labeled p-trees with n black vertices, ordered lexicographically by
// coding (C, then L). Throws CapExceededError if shapes * labelings > cap.
std::vector<LabeledPTree> enumerate_labeled_ptrees(std::int32_t p, std::int64_t n,
                                                   std::int64_t cap = 1 << 20);

// All admissible increment vectors (d_0..d_{p-1}) for one black vertex.
std::vector<std::vector<std::int32_t>> enumerate_increment_vectors(std::int32_t p);

// --- branching subtrees -----------------------------------------------

// One branch hanging off the ancestral line of a corner: a black child w of
// a white vertex u on the line (u itself included), packaged as the p-tree
// rooted at a copy of u with the single black child w, labels shifted so the
// root label is 0.
struct BranchSubtree {
    bool right = true;        // side of the ancestral line
    std::int32_t level = 0;   // half-generation of u
    bool root_is_copy = true; // true for branches at a line white (the root
                              // duplicates u); false for white siblings
                              // hanging off a line black
    LabeledPTree subtree;
};

// Branches strictly after (right) or strictly before (left) corner i of the
// white contour. Together with the ancestral line of v_i and the descendants
// of v_i reached after/before the corner, the two sides partition the tree.
std::vector<BranchSubtree> branching_subtrees(const LabeledPTree& theta,
                                              const ContourCoding& coding,
                                              std::int64_t corner_index, bool right);

}  // namespace randmaps
