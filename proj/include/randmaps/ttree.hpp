#pragma once

#include <cstdint>
#include <vector>

#include "randmaps/errors.hpp"
#include "randmaps/plane_tree.hpp"
#include "randmaps/rng.hpp"

namespace randmaps {

// Four-type plane tree encoding triangulations. Vertices at even generation
// (types 1 and 2, "white") carry integer labels. Structure rules: the root
// has type 1 or 2; children of type 1 are type 3; a non-root type 2 has one
// type-4 child (the type-2 root has two); type 3 has one type-2 child; type 4
// has one type-1 child or two type-2 children. Around every odd vertex the
// cyclic label increments are >= -1, and >= 0 into type-2 vertices, which
// forces: type-3 child increment in {0,1}, single type-4 child increment in
// {-1,0}, and equality across a type-4 vertex with two type-2 children.
struct LabeledTTree {
    PlaneTree tree;
    std::vector<std::int8_t> type;
    std::vector<std::int32_t> label;  // meaningful for types 1 and 2
    std::int64_t type_count[5] = {0, 0, 0, 0, 0};

    bool is_white(std::int32_t v) const { return type[v] == 1 || type[v] == 2; }
    void recount();
    void validate() const;

    // number of admissible labelings of the shape: 2^(#type3 + #single type4)
    std::int64_t free_label_sites() const;
};

// Offspring parameters making the conditioned tree uniform over labeled
// T-trees with a prescribed number of type-1 vertices.
struct GwParams {
    double beta;   // geometric parameter for type-1 offspring
    double alpha;  // probability of a single type-1 child at a type-4 vertex
    GwParams();
    void validate() const;  // 0 < beta, alpha < 1 and critical mean matrix
};

struct TTreeSample {
    LabeledTTree tree;  // labels all zero; shape + types only
    std::int64_t attempts = 0;
};

// Rejection sampling of the 4-type Galton-Watson tree conditioned on exactly
// n-1 type-1 vertices (window > 0 relaxes to a count in [n-1, n-1+window]).
// Throws RejectionBudgetError when max_attempts is exhausted.
TTreeSample sample_conditioned_ttree(std::int64_t n, std::int32_t root_type, Rng& rng,
                                     std::int64_t max_attempts = 1'000'000'000,
                                     std::int64_t window = 0);

// Uniform admissible labeling: independent uniform binary increments at each
// type-3 vertex and each single-child type-4 vertex.
LabeledTTree sample_admissible_tlabels(const LabeledTTree& shape, Rng& rng);

}  // namespace randmaps
