#pragma once

#include <cstdint>
#include <vector>

namespace randmaps {

// Rooted ordered tree. Vertices are indexed 0..V-1 in depth-first (preorder)
// order, which the builders below guarantee; the root is vertex 0.
struct PlaneTree {
    std::vector<std::int32_t> parent;        // -1 for the root
    std::vector<std::int32_t> first_child;   // -1 if leaf
    std::vector<std::int32_t> next_sibling;  // -1 if last child
    std::vector<std::int32_t> depth;

    std::int32_t size() const { return static_cast<std::int32_t>(parent.size()); }

    std::int32_t child_count(std::int32_t v) const {
        std::int32_t k = 0;
        for (std::int32_t c = first_child[v]; c >= 0; c = next_sibling[c]) ++k;
        return k;
    }

    std::vector<std::int32_t> children(std::int32_t v) const {
        std::vector<std::int32_t> out;
        for (std::int32_t c = first_child[v]; c >= 0; c = next_sibling[c]) out.push_back(c);
        return out;
    }

    // Build from a preorder child-count sequence (Lukasiewicz reconstruction).
    static PlaneTree from_preorder_degrees(const std::vector<std::int32_t>& deg) {
        PlaneTree t;
        const auto n = static_cast<std::int32_t>(deg.size());
        t.parent.assign(n, -1);
        t.first_child.assign(n, -1);
        t.next_sibling.assign(n, -1);
        t.depth.assign(n, 0);
        // stack of (vertex, children still to attach)
        std::vector<std::pair<std::int32_t, std::int32_t>> st;
        std::vector<std::int32_t> last_child(n, -1);
        for (std::int32_t v = 0; v < n; ++v) {
            if (v > 0) {
                while (!st.empty() && st.back().second == 0) st.pop_back();
                auto& top = st.back();
                std::int32_t u = top.first;
                t.parent[v] = u;
                t.depth[v] = t.depth[u] + 1;
                if (last_child[u] < 0)
                    t.first_child[u] = v;
                else
                    t.next_sibling[last_child[u]] = v;
                last_child[u] = v;
                --top.second;
            }
            st.emplace_back(v, deg[v]);
        }
        return t;
    }

    // Preorder child counts (inverse of from_preorder_degrees).
    std::vector<std::int32_t> preorder_degrees() const {
        std::vector<std::int32_t> deg(parent.size());
        for (std::int32_t v = 0; v < size(); ++v) deg[v] = child_count(v);
        return deg;
    }

    bool is_ancestor(std::int32_t a, std::int32_t v) const {
        while (v >= 0) {
            if (v == a) return true;
            v = parent[v];
        }
        return false;
    }
};

}  // namespace randmaps
