#include "randmaps/bdg.hpp"

#include <algorithm>

#include "randmaps/detail/corner_map.hpp"

namespace randmaps {

BdgMap bdg_forward(const LabeledPTree& theta, std::int32_t eps) {
    BdgMap bm;
    bm.p = theta.p;
    bm.n = theta.n_black;
    bm.eps = eps;
    bm.coding = contour_and_labels(theta);
    const std::int64_t pn = bm.coding.length();

    // map vertex ids: whites by preorder-white index, pointed vertex last
    bm.white_map_vertex.assign(theta.tree.size(), UINT32_MAX);
    std::uint32_t next = 0;
    for (std::int32_t v = 0; v < theta.tree.size(); ++v)
        if (theta.is_white(v)) bm.white_map_vertex[static_cast<std::size_t>(v)] = next++;
    const std::uint32_t point = next;
    const std::int64_t V = next + 1;

    std::vector<std::int32_t> labels(bm.coding.L.begin(), bm.coding.L.end() - 1);
    detail::CornerSweep sw = detail::corner_sweep(labels);
    bm.succ = sw.succ;
    bm.min_label = sw.min_label;

    std::vector<std::uint32_t> corner_vtx(static_cast<std::size_t>(pn));
    for (std::int64_t i = 0; i < pn; ++i) corner_vtx[static_cast<std::size_t>(i)] = bm.corner_map_vertex(i);
    detail::CornerMapParts parts = detail::assemble_corner_map(sw, corner_vtx, V, point);
    PlanarMap& map = bm.map;
    map.alpha = std::move(parts.alpha);
    map.set_rotations(parts.rot);
    map.pointed = point;
    map.vertex_origin.assign(static_cast<std::size_t>(V), PlanarMap::ORIGIN_POINT);
    for (std::int32_t v = 0; v < theta.tree.size(); ++v)
        if (theta.is_white(v))
            map.vertex_origin[bm.white_map_vertex[static_cast<std::size_t>(v)]] = v;

    // root edge: the arc emitted at corner 0 (root to its successor; the
    // successor is the pointed vertex when min label is 0)
    map.root_half = eps == 1 ? 0 : 1;
    map.validate();
    return bm;
}

DistanceFormulaReport verify_distance_formula(const BdgMap& bm) {
    DistanceFormulaReport rep;
    DistanceField df = bfs_distances(bm.map, bm.map.pointed);
    const std::int64_t pn = bm.coding.length();
    std::vector<std::uint8_t> done(bm.map.vertex_count(), 0);
    for (std::int64_t i = 0; i < pn; ++i) {
        std::uint32_t v = bm.corner_map_vertex(i);
        if (done[v]) continue;
        done[v] = 1;
        std::int32_t expect = bm.coding.L[static_cast<std::size_t>(i)] - bm.min_label + 1;
        if (df.d[v] != expect) {
            rep.ok = false;
            rep.violations.push_back(v);
        }
    }
    return rep;
}

GeodesicPath simple_geodesic(const BdgMap& bm, std::int64_t corner) {
    const std::int64_t pn = bm.coding.length();
    RM_CHECK(corner >= 0 && corner < pn, "corner out of range");
    const std::int32_t l0 = bm.coding.L[static_cast<std::size_t>(corner)];
    const std::int32_t depth = l0 - bm.min_label;
    GeodesicPath path;
    path.vertices.reserve(static_cast<std::size_t>(depth) + 2);
    path.vertices.push_back(bm.corner_map_vertex(corner));
    std::int64_t j = corner;
    for (std::int32_t k = 1; k <= depth; ++k) {
        while (bm.coding.L[static_cast<std::size_t>(j % pn)] != l0 - k) {
            ++j;
            RM_CHECK(j < corner + pn, "simple geodesic: level not found");
        }
        path.vertices.push_back(bm.corner_map_vertex(j % pn));
    }
    path.vertices.push_back(bm.map.pointed);
    return path;
}

std::int64_t cactus_bound(const ContourCoding& coding, std::int64_t i, std::int64_t j) {
    const std::int64_t pn = coding.length();
    RM_CHECK(i >= 0 && j >= 0 && i <= pn && j <= pn, "corner out of range");
    if (i > j) std::swap(i, j);
    std::int32_t min_inner = coding.L[static_cast<std::size_t>(i)];
    for (std::int64_t k = i; k <= j; ++k)
        min_inner = std::min(min_inner, coding.L[static_cast<std::size_t>(k)]);
    std::int32_t min_outer = coding.L[static_cast<std::size_t>(j)];
    for (std::int64_t k = j; k <= i + pn; ++k)
        min_outer = std::min(min_outer, coding.L[static_cast<std::size_t>(k % pn)]);
    return coding.L[static_cast<std::size_t>(i)] + coding.L[static_cast<std::size_t>(j)] -
           2 * std::max(min_inner, min_outer) + 2;
}

Reroot reroot_uniform(const BdgMap& bm, const LabeledPTree& theta, Rng& rng) {
    const std::int64_t pn = bm.coding.length();
    const std::int64_t V = bm.map.vertex_count();  // (p-1)n + 2
    Reroot out;
    std::int64_t U = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(pn)));
    out.edge_half = static_cast<std::uint32_t>(2 * U + (rng.bernoulli(0.5) ? 1 : 0));

    // candidate vertex near the U-th construction step: the next contour
    // vertex when the walk stays level or descends, else a uniform child of
    // the black parent of v_U
    std::uint32_t hat;
    if (bm.coding.C[static_cast<std::size_t>(U + 1)] >= bm.coding.C[static_cast<std::size_t>(U)]) {
        hat = bm.corner_map_vertex(U + 1);
    } else {
        std::int32_t v = bm.coding.corner_vertex[static_cast<std::size_t>(U)];
        std::int32_t b = theta.tree.parent[v];
        RM_CHECK(b >= 0 && !theta.is_white(b), "contour ascent without black parent");
        auto kids = theta.tree.children(b);
        std::int32_t w = kids[rng.uniform_below(kids.size())];
        hat = bm.white_map_vertex[static_cast<std::size_t>(w)];
    }

    // mix with the root and the pointed vertex to make the law exactly uniform
    std::uint64_t r = rng.uniform_below(static_cast<std::uint64_t>(V));
    if (r == 0)
        out.new_pointed = bm.corner_map_vertex(0);  // tree root
    else if (r == 1)
        out.new_pointed = bm.map.pointed;
    else
        out.new_pointed = hat;

    DistanceField df = bfs_distances(bm.map, out.new_pointed);
    out.distance = df.d[bm.map.vertex_of[out.edge_half]];
    out.near = out.distance <= bm.p;
    return out;
}

}  // namespace randmaps
