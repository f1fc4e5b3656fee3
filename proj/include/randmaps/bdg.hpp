#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randmaps/labeled_ptree.hpp"
#include "randmaps/planar_map.hpp"
#include "randmaps/rng.hpp"

namespace randmaps {

// Output of the tree-to-map construction. Arc i is the edge emitted at white
// contour corner i; its half 2i sits at the corner's vertex and half 2i+1 at
// the target (successor corner's vertex, or the pointed vertex for minimal
// labels). Map vertex ids: white tree vertices keep their white index
// (position among white vertices in tree preorder); the pointed vertex comes
// last.
struct BdgMap {
    PlanarMap map;
    std::int32_t p = 2;
    std::int64_t n = 0;
    std::int32_t eps = 1;
    ContourCoding coding;
    std::vector<std::int64_t> succ;              // successor corner, or -1 for arcs to the point
    std::vector<std::uint32_t> white_map_vertex;  // tree vertex id -> map vertex id
    std::int32_t min_label = 0;

    std::uint32_t corner_map_vertex(std::int64_t corner) const {
        return white_map_vertex[static_cast<std::size_t>(
            coding.corner_vertex[static_cast<std::size_t>(corner)])];
    }
};

// The Bouttier-Di Francesco-Guitter construction: rooted, pointed
// 2p-angulation with n faces from a labeled p-tree. eps flips the root-edge
// orientation only.
BdgMap bdg_forward(const LabeledPTree& theta, std::int32_t eps);

// Report of the distance identity d(point, v) = l_v - min l + 1.
struct DistanceFormulaReport {
    bool ok = true;
    std::vector<std::uint32_t> violations;  // offending map vertices
};
DistanceFormulaReport verify_distance_formula(const BdgMap& bm);

// Discrete simple geodesic from corner i to the pointed vertex:
// omega(k) = v at the first corner in {i..i+pn-1} with label l_{v_i} - k.
GeodesicPath simple_geodesic(const BdgMap& bm, std::int64_t corner);

// Label upper bound on d(v_i, v_j): two-arc cactus bound.
std::int64_t cactus_bound(const ContourCoding& coding, std::int64_t i, std::int64_t j);

// The re-rooting device: a uniformly chosen construction edge plus a
// uniformly distributed second pointed vertex that is near its origin with
// high probability.
struct Reroot {
    std::uint32_t edge_half = 0;    // uniformly oriented second root edge
    std::uint32_t new_pointed = 0;  // uniformly distributed vertex
    bool near = false;              // d(new_pointed, origin(edge_half)) <= p
    std::int32_t distance = 0;      // d(new_pointed, origin(edge_half))
};
Reroot reroot_uniform(const BdgMap& bm, const LabeledPTree& theta, Rng& rng);

}  // namespace randmaps
