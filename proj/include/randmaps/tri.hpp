#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "randmaps/labeled_ptree.hpp"
#include "randmaps/planar_map.hpp"
#include "randmaps/ttree.hpp"

namespace randmaps {

// Rooted, pointed triangulation produced from a labeled T-tree: arcs drawn by
// the successor rule over the white contour, then every type-2 vertex erased
// and its two arcs merged into one edge. Retains what the half-integer
// distance extension needs: the erased vertices' two type-1 endpoints.
struct TriMap {
    PlanarMap map;
    std::int64_t n_vertices = 0;  // n = #type-1 + 1
    bool positive = true;
    ContourCoding coding;  // white contour (types 1 and 2) with labels
    std::vector<std::uint32_t> white_map_vertex;  // tree id -> map vertex; UINT32_MAX for erased
    std::vector<std::array<std::uint32_t, 2>> mid_successors;  // per erased type-2 vertex
    std::vector<std::int32_t> mid_tree_vertex;                  // its tree id
    std::int32_t min_label = 0;

    bool corner_is_type1(std::int64_t i) const {
        return white_map_vertex[static_cast<std::size_t>(
                   coding.corner_vertex[static_cast<std::size_t>(i)])] != UINT32_MAX;
    }
    std::uint32_t corner_map_vertex(std::int64_t i) const {
        return white_map_vertex[static_cast<std::size_t>(
            coding.corner_vertex[static_cast<std::size_t>(i)])];
    }
};

TriMap ttree_to_triangulation(const LabeledTTree& theta);

// Distances on the triangulation extended by a midpoint vertex for each
// erased type-2 vertex, in doubled units so everything stays integral.
// Nodes 0..V-1 are map vertices, V+j the j-th midpoint.
struct HalfMetric {
    std::int64_t map_vertices = 0;
    std::int64_t midpoints = 0;
    std::vector<std::array<std::uint32_t, 2>> succ;  // midpoint endpoints
    std::vector<std::vector<std::int32_t>> base;     // BFS fields from each map vertex

    std::int64_t node_count() const { return map_vertices + midpoints; }
    std::int32_t doubled_distance(std::int64_t a, std::int64_t b) const;
};
HalfMetric half_distance_extension(const TriMap& tm);

// Numeric evaluation of the offspring mean matrix, its eigvectors and the
// scaling constants, cross-checked against closed forms by the caller.
struct TriConstants {
    double mean[4][4];
    double spectral_radius;
    double a[4];  // left eigenvector, sums to 1
    double b[4];  // right eigenvector, a.b = 1
    double a_q_b;
    double lambda32;
    double sigma_sq;
    double kappa32;
};
TriConstants verify_tri_constants();

// Bipartite-side constants.
double lambda_p(std::int32_t p);
double kappa_p(std::int32_t p);
double c_q(std::int32_t q);  // (9/(q(q-2)))^{1/4} for even q, 6^{1/4} for q = 3

}  // namespace randmaps
