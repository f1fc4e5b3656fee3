#pragma once

#include <cstdint>
#include <vector>

#include "randmaps/bdg.hpp"
#include "randmaps/labeled_ptree.hpp"
#include "randmaps/planar_map.hpp"

namespace randmaps {

// Map with geodesic boundaries: the 2p-angulation cut along the leftmost
// geodesic from the tree root to the pointed vertex. delta = -min l + 1.
// Chain vertices tilde v_1..tilde v_{delta-1} carry labels -1..-(delta-1)
// and sit between the tree root (= gamma~(0)) and the pointed vertex.
// For delta = 1 the map equals the plain construction.
struct Dmgb {
    PlanarMap map;
    std::int32_t p = 2;
    std::int64_t n = 0;
    std::int32_t delta = 1;
    ContourCoding coding;
    std::vector<std::int64_t> succ;               // as in BdgMap; -2 marks chain arcs
    std::vector<std::uint32_t> white_map_vertex;  // tree vertex id -> map vertex id
    std::vector<std::uint32_t> gamma;             // left boundary geodesic, delta+1 vertices
    std::vector<std::uint32_t> gamma_tilde;       // right boundary geodesic
    std::int32_t min_label = 0;

    std::uint32_t corner_map_vertex(std::int64_t corner) const {
        return white_map_vertex[static_cast<std::size_t>(
            coding.corner_vertex[static_cast<std::size_t>(corner)])];
    }
    std::uint32_t chain_vertex(std::int32_t k) const;  // tilde v_k, 0..delta
};

Dmgb build_dmgb(const LabeledPTree& theta);

// (gamma, gamma~): certified geodesics from the tree root to the pointed
// vertex, recomputed from the coding (first-hit corners / chain vertices).
std::pair<GeodesicPath, GeodesicPath> boundary_geodesics(const Dmgb& d);

struct DmgbReport {
    bool ok = true;
    std::int64_t endpoint_violations = 0;  // (i)   boundary geodesics meet inside
    std::int64_t monotone_violations = 0;  // (ii)  d > d~ somewhere
    std::int64_t point_violations = 0;     // (iii) d~(v, point) != l_v + delta
    std::int64_t root_violations = 0;      // (iv)  d~(root, v) != d(root, v)
    std::int64_t chain_violations = 0;     // d <= d~ <= d-one-arc-bound broken
};

// Checks properties (i)-(iv) against the uncut map, plus the sandwich
// d <= d~ <= one-arc cactus bound on `pair_samples` random corner pairs
// (all pairs when pair_samples < 0).
DmgbReport verify_dmgb_properties(const Dmgb& d, const BdgMap& uncut, Rng& rng,
                                  std::int64_t pair_samples = -1);

// One-arc label bound of the cut map: L_i + L_j - 2 min_{[i..j]} L + 2.
std::int64_t one_arc_bound(const ContourCoding& coding, std::int64_t i, std::int64_t j);

// Extended simple geodesic: follows the plain simple geodesic until its next
// step would wrap past the contour end, then descends the chain.
GeodesicPath dmgb_simple_geodesic(const Dmgb& d, std::int64_t corner);

// Gluing gamma(i) onto gamma~(i) and merging the doubled edges; the result
// must be isomorphic (rooted, pointed) to the uncut map.
PlanarMap glue_dmgb(const Dmgb& d);

}  // namespace randmaps
