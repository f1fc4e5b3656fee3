#include "randmaps/ttree.hpp"

#include <cmath>

namespace randmaps {

GwParams::GwParams() {
    const double s3 = std::sqrt(3.0);
    beta = 1.0 - s3 / 3.0;
    alpha = 0.5 + s3 / 6.0;
}

void GwParams::validate() const {
    RM_CHECK(beta > 0 && beta < 1, "beta out of range");
    RM_CHECK(alpha > 0 && alpha < 1, "alpha out of range");
}

void LabeledTTree::recount() {
    for (auto& c : type_count) c = 0;
    for (std::int8_t t : type) type_count[static_cast<std::size_t>(t)]++;
}

std::int64_t LabeledTTree::free_label_sites() const {
    std::int64_t sites = 0;
    for (std::int32_t v = 0; v < tree.size(); ++v) {
        if (type[v] == 3) ++sites;
        if (type[v] == 4 && tree.child_count(v) == 1) ++sites;
    }
    return sites;
}

void LabeledTTree::validate() const {
    const auto V = tree.size();
    RM_CHECK(V > 0 && static_cast<std::int32_t>(type.size()) == V &&
                 static_cast<std::int32_t>(label.size()) == V,
             "t-tree arrays inconsistent");
    RM_CHECK(type[0] == 1 || type[0] == 2, "root type must be 1 or 2");
    for (std::int32_t v = 0; v < V; ++v) {
        auto kids = tree.children(v);
        switch (type[v]) {
            case 1:
                for (auto c : kids) RM_CHECK(type[c] == 3, "type-1 child not type 3");
                break;
            case 2:
                if (v == 0) {
                    RM_CHECK(kids.size() == 2 && type[kids[0]] == 4 && type[kids[1]] == 4,
                             "type-2 root needs two type-4 children");
                } else {
                    RM_CHECK(kids.size() == 1 && type[kids[0]] == 4,
                             "type-2 vertex needs one type-4 child");
                }
                break;
            case 3:
                RM_CHECK(kids.size() == 1 && type[kids[0]] == 2,
                         "type-3 vertex needs one type-2 child");
                break;
            case 4:
                if (kids.size() == 1)
                    RM_CHECK(type[kids[0]] == 1, "single type-4 child must be type 1");
                else
                    RM_CHECK(kids.size() == 2 && type[kids[0]] == 2 && type[kids[1]] == 2,
                             "type-4 vertex needs one type-1 or two type-2 children");
                break;
            default:
                RM_CHECK(false, "bad vertex type");
        }
        RM_CHECK((tree.depth[v] % 2 == 0) == is_white(v), "type parity mismatch");
    }
    RM_CHECK(label[0] == 0, "root label must be 0");
    // label admissibility around odd vertices
    for (std::int32_t v = 0; v < V; ++v) {
        if (is_white(v)) continue;
        std::int32_t prev = label[tree.parent[v]];
        std::vector<std::int32_t> cyc = tree.children(v);
        cyc.push_back(tree.parent[v]);
        for (std::int32_t u : cyc) {
            RM_CHECK(label[u] >= prev - 1, "label increment < -1");
            if (type[u] == 2) RM_CHECK(label[u] >= prev, "decrease into type-2 vertex");
            prev = label[u];
        }
    }
}

TTreeSample sample_conditioned_ttree(std::int64_t n, std::int32_t root_type, Rng& rng,
                                     std::int64_t max_attempts, std::int64_t window) {
    RM_CHECK(n >= 3, "need n >= 3");
    RM_CHECK(root_type == 1 || root_type == 2, "root type must be 1 or 2");
    GwParams par;
    const std::int64_t lo = n - 1, hi = n - 1 + window;
    std::vector<std::int32_t> deg;
    std::vector<std::int8_t> typ;
    for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        deg.clear();
        typ.clear();
        std::int64_t t1 = 0;
        bool ok = true;
        std::vector<std::int8_t> st;  // pending vertex types, LIFO
        st.push_back(static_cast<std::int8_t>(root_type));
        bool root_pending = true;
        while (!st.empty()) {
            std::int8_t t = st.back();
            st.pop_back();
            typ.push_back(t);
            bool at_root = root_pending;
            root_pending = false;
            switch (t) {
                case 1: {
                    ++t1;
                    if (t1 > hi) {
                        ok = false;
                        break;
                    }
                    auto k = rng.geometric(par.beta);
                    deg.push_back(static_cast<std::int32_t>(k));
                    for (std::int64_t j = 0; j < k; ++j) st.push_back(3);
                    break;
                }
                case 2: {
                    std::int32_t k = at_root ? 2 : 1;
                    deg.push_back(k);
                    for (std::int32_t j = 0; j < k; ++j) st.push_back(4);
                    break;
                }
                case 3:
                    deg.push_back(1);
                    st.push_back(2);
                    break;
                case 4:
                    if (rng.bernoulli(par.alpha)) {
                        deg.push_back(1);
                        st.push_back(1);
                    } else {
                        deg.push_back(2);
                        st.push_back(2);
                        st.push_back(2);
                    }
                    break;
            }
            if (!ok) break;
        }
        if (!ok || t1 < lo || t1 > hi) continue;
        TTreeSample out;
        out.attempts = attempt;
        out.tree.tree = PlaneTree::from_preorder_degrees(deg);
        out.tree.type = typ;
        out.tree.label.assign(deg.size(), 0);
        out.tree.recount();
        return out;
    }
    throw RejectionBudgetError("t-tree rejection budget exceeded", max_attempts,
                               1.0 / static_cast<double>(max_attempts));
}

LabeledTTree sample_admissible_tlabels(const LabeledTTree& shape, Rng& rng) {
    LabeledTTree out = shape;
    out.label.assign(shape.tree.size(), 0);
    for (std::int32_t v = 0; v < shape.tree.size(); ++v) {
        if (out.is_white(v)) continue;
        std::int32_t parent_label = out.label[shape.tree.parent[v]];
        auto kids = shape.tree.children(v);
        if (shape.type[v] == 3) {
            out.label[kids[0]] = parent_label + (rng.bernoulli(0.5) ? 1 : 0);
        } else if (kids.size() == 1) {
            out.label[kids[0]] = parent_label - (rng.bernoulli(0.5) ? 1 : 0);
        } else {
            out.label[kids[0]] = parent_label;
            out.label[kids[1]] = parent_label;
        }
    }
    return out;
}

}  // namespace randmaps
