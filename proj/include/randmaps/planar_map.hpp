#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "randmaps/errors.hpp"

namespace randmaps {

// Rooted, pointed combinatorial map as half-edge permutations. alpha is the
// fixed-point-free edge involution, sigma the next half-edge in the stored
// rotation around its vertex; faces are orbits of sigma∘alpha. Root is an
// oriented half-edge (based at the root vertex), `pointed` the distinguished
// vertex.
struct PlanarMap {
    std::vector<std::uint32_t> alpha;
    std::vector<std::uint32_t> sigma;
    std::vector<std::uint32_t> vertex_of;
    std::vector<std::uint32_t> vertex_half;  // one incident half per vertex
    std::uint32_t root_half = 0;
    std::uint32_t pointed = 0;
    // per-vertex origin: >= 0 tree vertex id; ORIGIN_POINT for the pointed
    // extra vertex; ORIGIN_EXTRA - k for chain vertex k of a DMGB
    static constexpr std::int64_t ORIGIN_POINT = -1;
    static constexpr std::int64_t ORIGIN_EXTRA = -2;
    std::vector<std::int64_t> vertex_origin;

    std::int64_t half_count() const { return static_cast<std::int64_t>(alpha.size()); }
    std::int64_t edge_count() const { return half_count() / 2; }
    std::int64_t vertex_count() const { return static_cast<std::int64_t>(vertex_half.size()); }

    // Build sigma/vertex_half from per-vertex rotation lists.
    void set_rotations(const std::vector<std::vector<std::uint32_t>>& rot);

    void validate() const;  // permutation/involution sanity + connectivity

    struct Face {
        std::int64_t degree;
        std::vector<std::uint32_t> halves;  // the sigma∘alpha orbit
    };
    std::vector<Face> faces() const;
    std::int64_t face_count() const;
    std::int64_t euler_characteristic() const;  // V - E + F

    std::vector<std::int32_t> degrees() const;  // vertex degrees

    // Canonical breadth-first code from a root half-edge; two rooted maps are
    // isomorphic iff their codes match. The pointed vertex is appended.
    std::vector<std::int32_t> canonical_code(std::uint32_t from_half) const;
    std::vector<std::int32_t> canonical_code() const { return canonical_code(root_half); }
};

struct DistanceField {
    std::uint32_t source = 0;
    std::vector<std::int32_t> d;
};

DistanceField bfs_distances(const PlanarMap& map, std::uint32_t source);

struct GeodesicPath {
    std::vector<std::uint32_t> vertices;
    std::int64_t length() const { return static_cast<std::int64_t>(vertices.size()) - 1; }
};

// true iff consecutive vertices are map-adjacent and the length equals the
// graph distance between the endpoints
bool certify_geodesic(const PlanarMap& map, const GeodesicPath& path);

// Text and binary export ("RMPM"); see docs/formats.md.
void write_map_text(std::ostream& os, const PlanarMap& map, std::int64_t p, std::int64_t n);
void write_map_binary(std::ostream& os, const PlanarMap& map);
PlanarMap read_map_binary(std::istream& is);

}  // namespace randmaps
