#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "randmaps/errors.hpp"

namespace randmaps::detail {

// Successor scan over a cyclic corner sequence whose labels never drop by
// more than one per step. Starting from the first minimal corner, every
// successor occurs before the sweep wraps, so one pass with one stack
// suffices; arcs still open at the end close at the starting corner.
struct CornerSweep {
    std::vector<std::int64_t> succ;                  // per corner; -1 = pointed vertex
    std::vector<std::vector<std::int32_t>> closers;  // per corner, innermost first
    std::vector<std::int64_t> min_corners;           // ascending contour order
    std::int32_t min_label = 0;
};

inline CornerSweep corner_sweep(const std::vector<std::int32_t>& labels) {
    const auto K = static_cast<std::int64_t>(labels.size());
    CornerSweep res;
    res.min_label = *std::min_element(labels.begin(), labels.end());
    std::int64_t i0 = 0;
    while (labels[static_cast<std::size_t>(i0)] != res.min_label) ++i0;
    res.succ.assign(K, -1);
    res.closers.assign(K, {});
    std::vector<std::int64_t> open;
    for (std::int64_t q = 0; q < K; ++q) {
        std::int64_t i = (i0 + q) % K;
        std::int32_t li = labels[static_cast<std::size_t>(i)];
        while (!open.empty() && labels[static_cast<std::size_t>(open.back())] == li + 1) {
            res.succ[static_cast<std::size_t>(open.back())] = i;
            res.closers[static_cast<std::size_t>(i)].push_back(
                static_cast<std::int32_t>(open.back()));
            open.pop_back();
        }
        RM_CHECK(open.empty() || labels[static_cast<std::size_t>(open.back())] <= li,
                 "successor scan: stack order violated");
        if (li == res.min_label)
            res.min_corners.push_back(i);
        else
            open.push_back(i);
    }
    while (!open.empty()) {
        RM_CHECK(labels[static_cast<std::size_t>(open.back())] == res.min_label + 1,
                 "corner with non-minimal label lacks a successor");
        res.succ[static_cast<std::size_t>(open.back())] = i0;
        res.closers[static_cast<std::size_t>(i0)].push_back(
            static_cast<std::int32_t>(open.back()));
        open.pop_back();
    }
    return res;
}

// Half-edge layout for corner constructions: arc i has half 2i at its corner
// vertex and half 2i+1 at the target. Per corner the closing arcs attach
// innermost first, then the outgoing arc; around the pointed vertex the arcs
// from minimal corners attach in reverse contour order.
struct CornerMapParts {
    std::vector<std::uint32_t> alpha;
    std::vector<std::vector<std::uint32_t>> rot;  // per map vertex, incl. point
};

inline CornerMapParts assemble_corner_map(const CornerSweep& sw,
                                          const std::vector<std::uint32_t>& corner_vertex,
                                          std::int64_t vertex_count, std::uint32_t point) {
    const auto K = static_cast<std::int64_t>(corner_vertex.size());
    CornerMapParts parts;
    parts.alpha.assign(static_cast<std::size_t>(2 * K), 0);
    for (std::int64_t a = 0; a < K; ++a) {
        parts.alpha[static_cast<std::size_t>(2 * a)] = static_cast<std::uint32_t>(2 * a + 1);
        parts.alpha[static_cast<std::size_t>(2 * a + 1)] = static_cast<std::uint32_t>(2 * a);
    }
    parts.rot.assign(static_cast<std::size_t>(vertex_count), {});
    for (std::int64_t i = 0; i < K; ++i) {
        auto v = corner_vertex[static_cast<std::size_t>(i)];
        for (std::int32_t c : sw.closers[static_cast<std::size_t>(i)])
            parts.rot[v].push_back(static_cast<std::uint32_t>(2 * c + 1));
        parts.rot[v].push_back(static_cast<std::uint32_t>(2 * i));
    }
    for (auto it = sw.min_corners.rbegin(); it != sw.min_corners.rend(); ++it)
        parts.rot[point].push_back(static_cast<std::uint32_t>(2 * *it + 1));
    return parts;
}

}  // namespace randmaps::detail
