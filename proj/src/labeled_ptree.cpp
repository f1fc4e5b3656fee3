#include "randmaps/labeled_ptree.hpp"

#include <algorithm>
#include <cstring>
#include <functional>

namespace randmaps {

void LabeledPTree::validate() const {
    const auto V = tree.size();
    RM_CHECK(V > 0, "empty tree");
    RM_CHECK(static_cast<std::int32_t>(label.size()) == V, "label size mismatch");
    std::int32_t blacks = 0;
    for (std::int32_t v = 0; v < V; ++v) {
        if (!is_white(v)) {
            ++blacks;
            RM_CHECK(tree.child_count(v) == p - 1, "black vertex without p-1 children");
        }
    }
    RM_CHECK(blacks == n_black, "black count mismatch");
    RM_CHECK(label[0] == 0, "root label must be 0");
    for (std::int32_t v = 0; v < V; ++v) {
        if (is_white(v)) continue;
        std::int32_t prev = label[tree.parent[v]];
        std::int64_t sum = 0;
        for (std::int32_t c = tree.first_child[v]; c >= 0; c = tree.next_sibling[c]) {
            std::int32_t d = label[c] - prev;
            RM_CHECK(d >= -1, "label increment < -1");
            sum += d;
            prev = label[c];
        }
        std::int32_t dclose = label[tree.parent[v]] - prev;
        RM_CHECK(dclose >= -1, "closing label increment < -1");
        sum += dclose;
        RM_CHECK(sum == 0, "cyclic increments do not sum to 0");
    }
}

void ContourCoding::validate() const {
    const std::int64_t k = length();
    if (k < 0 || C.size() != L.size())
        throw MalformedCodingError("coding arrays empty or of unequal length", 0);
    if (C[0] != 0) throw MalformedCodingError("C_0 != 0", 0);
    if (L[0] != 0) throw MalformedCodingError("Lambda_0 != 0", 0);
    if (C[k] != 0) throw MalformedCodingError("C_pn != 0", k);
    for (std::int64_t i = 0; i < k; ++i) {
        if (std::abs(C[i + 1] - C[i]) > 1) throw MalformedCodingError("|C step| > 1", i + 1);
        if (C[i + 1] < 0) throw MalformedCodingError("C < 0", i + 1);
        if (L[i + 1] < L[i] - 1) throw MalformedCodingError("Lambda step < -1", i + 1);
    }
}

// White contour walk: emit v, then after each black child's block of white
// subtrees emit v again. Iterative; `emit` receives the white vertex id.
template <class F>
static void white_contour_walk(const PlaneTree& tree, F&& emit) {
    struct Item {
        std::int32_t v;
        bool expand;
    };
    std::vector<Item> st;
    std::vector<std::int32_t> buf;
    st.push_back({0, true});
    while (!st.empty()) {
        Item it = st.back();
        st.pop_back();
        emit(it.v);
        if (!it.expand) continue;
        buf.clear();
        for (std::int32_t b = tree.first_child[it.v]; b >= 0; b = tree.next_sibling[b])
            buf.push_back(b);
        for (auto bi = buf.rbegin(); bi != buf.rend(); ++bi) {
            st.push_back({it.v, false});
            std::int32_t nw = 0;
            std::int32_t ws[64];
            for (std::int32_t w = tree.first_child[*bi]; w >= 0; w = tree.next_sibling[w])
                ws[nw++] = w;
            for (std::int32_t j = nw - 1; j >= 0; --j) st.push_back({ws[j], true});
        }
    }
}

ContourCoding contour_and_labels(const LabeledPTree& theta) {
    ContourCoding out;
    out.p = theta.p;
    out.n = theta.n_black;
    const std::int64_t pn = static_cast<std::int64_t>(theta.p) * theta.n_black;
    out.C.reserve(pn + 1);
    out.L.reserve(pn + 1);
    out.corner_vertex.reserve(pn + 1);
    white_contour_walk(theta.tree, [&](std::int32_t v) {
        out.corner_vertex.push_back(v);
        out.C.push_back(theta.tree.depth[v] / 2);
        out.L.push_back(theta.label[v]);
    });
    RM_CHECK(static_cast<std::int64_t>(out.C.size()) == pn + 1, "contour length mismatch");
    return out;
}

LabeledPTree decode_contour(const std::vector<std::int32_t>& C,
                            const std::vector<std::int32_t>& L, std::int32_t p) {
    ContourCoding probe;
    probe.p = p;
    probe.C = C;
    probe.L = L;
    probe.validate();
    const std::int64_t k = probe.length();
    if (k % p != 0) throw MalformedCodingError("length not a multiple of p", k);

    // Temporary structure: children lists, colors by depth, labels.
    struct TmpVert {
        std::int32_t parent = -1;
        std::vector<std::int32_t> children;
        std::int32_t label = 0;
        std::int32_t depth = 0;
    };
    std::vector<TmpVert> vs;
    vs.push_back({});  // white root, label 0
    std::vector<std::int32_t> white_path{0};  // current ancestral whites
    std::vector<std::int32_t> black_path;     // blacks between them

    auto new_vert = [&](std::int32_t parent, std::int32_t label) {
        TmpVert t;
        t.parent = parent;
        t.label = label;
        t.depth = vs[parent].depth + 1;
        vs.push_back(t);
        std::int32_t id = static_cast<std::int32_t>(vs.size()) - 1;
        vs[parent].children.push_back(id);
        return id;
    };

    for (std::int64_t i = 0; i < k; ++i) {
        std::int32_t dc = C[i + 1] - C[i];
        std::int32_t cur = white_path.back();
        if (dc == +1) {
            std::int32_t b = new_vert(cur, 0);
            std::int32_t w = new_vert(b, L[i + 1]);
            black_path.push_back(b);
            white_path.push_back(w);
        } else if (dc == 0) {
            if (black_path.empty())
                throw MalformedCodingError("level step 0 at the root", i + 1);
            std::int32_t b = black_path.back();
            if (static_cast<std::int32_t>(vs[b].children.size()) >= p - 1)
                throw MalformedCodingError("black vertex exceeds p-1 children", i + 1);
            std::int32_t w = new_vert(b, L[i + 1]);
            white_path.back() = w;
        } else {
            if (black_path.empty())
                throw MalformedCodingError("level step -1 at the root", i + 1);
            std::int32_t b = black_path.back();
            if (static_cast<std::int32_t>(vs[b].children.size()) != p - 1)
                throw MalformedCodingError("black vertex closed without p-1 children", i + 1);
            black_path.pop_back();
            white_path.pop_back();
            if (vs[white_path.back()].label != L[i + 1])
                throw MalformedCodingError("label mismatch at revisited vertex", i + 1);
        }
    }
    if (white_path.size() != 1)
        throw MalformedCodingError("coding does not return to the root", k);

    // Re-index in full-tree preorder.
    const auto V = static_cast<std::int32_t>(vs.size());
    LabeledPTree out;
    out.p = p;
    out.n_black = static_cast<std::int32_t>(k / p);
    out.tree.parent.assign(V, -1);
    out.tree.first_child.assign(V, -1);
    out.tree.next_sibling.assign(V, -1);
    out.tree.depth.assign(V, 0);
    out.label.assign(V, 0);
    std::vector<std::int32_t> order(V, -1);
    std::vector<std::int32_t> stack{0};
    std::int32_t next_id = 0;
    std::vector<std::int32_t> last_child(V, -1);
    while (!stack.empty()) {
        std::int32_t v = stack.back();
        stack.pop_back();
        std::int32_t id = next_id++;
        order[v] = id;
        out.tree.depth[id] = vs[v].depth;
        out.label[id] = vs[v].label;
        if (vs[v].parent >= 0) {
            std::int32_t pid = order[vs[v].parent];
            out.tree.parent[id] = pid;
            if (last_child[pid] < 0)
                out.tree.first_child[pid] = id;
            else
                out.tree.next_sibling[last_child[pid]] = id;
            last_child[pid] = id;
        }
        for (auto ci = vs[v].children.rbegin(); ci != vs[v].children.rend(); ++ci)
            stack.push_back(*ci);
    }
    out.validate();
    return out;
}

// --- RMLT serialization -------------------------------------------------

static void put_u16(std::vector<std::uint8_t>& b, std::uint16_t x) {
    b.push_back(static_cast<std::uint8_t>(x & 0xff));
    b.push_back(static_cast<std::uint8_t>(x >> 8));
}
static void put_u64(std::vector<std::uint8_t>& b, std::uint64_t x) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>((x >> (8 * i)) & 0xff));
}
static void put_varint(std::vector<std::uint8_t>& b, std::int64_t v) {
    std::uint64_t z = (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
    while (z >= 0x80) {
        b.push_back(static_cast<std::uint8_t>(z) | 0x80);
        z >>= 7;
    }
    b.push_back(static_cast<std::uint8_t>(z));
}

std::vector<std::uint8_t> serialize_coding(const ContourCoding& coding) {
    std::vector<std::uint8_t> b;
    b.push_back('R');
    b.push_back('M');
    b.push_back('L');
    b.push_back('T');
    put_u16(b, 1);
    put_u16(b, static_cast<std::uint16_t>(coding.p));
    put_u64(b, static_cast<std::uint64_t>(coding.n));
    const std::int64_t k = coding.length();
    for (std::int64_t i = 0; i < k; ++i)
        b.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(coding.C[i + 1] - coding.C[i])));
    for (std::int64_t i = 0; i < k; ++i)
        put_varint(b, coding.L[i + 1] - coding.L[i]);
    return b;
}

ContourCoding deserialize_coding(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t n) {
        if (pos + n > bytes.size()) throw Error("RMLT: truncated input");
    };
    need(4);
    if (std::memcmp(bytes.data(), "RMLT", 4) != 0) throw Error("RMLT: bad magic");
    pos = 4;
    need(2);
    std::uint16_t version = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
    pos += 2;
    if (version != 1) throw Error("RMLT: unsupported version");
    need(2);
    std::int32_t p = static_cast<std::int32_t>(bytes[pos] | (bytes[pos + 1] << 8));
    pos += 2;
    need(8);
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    const std::int64_t k = static_cast<std::int64_t>(p) * static_cast<std::int64_t>(n);
    ContourCoding out;
    out.p = p;
    out.n = static_cast<std::int64_t>(n);
    out.C.assign(1, 0);
    out.L.assign(1, 0);
    need(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) {
        auto d = static_cast<std::int8_t>(bytes[pos++]);
        out.C.push_back(out.C.back() + d);
    }
    for (std::int64_t i = 0; i < k; ++i) {
        std::uint64_t z = 0;
        int shift = 0;
        for (;;) {
            need(1);
            std::uint8_t byte = bytes[pos++];
            z |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
            if (!(byte & 0x80)) break;
            shift += 7;
        }
        auto d = static_cast<std::int64_t>((z >> 1) ^ (~(z & 1) + 1));
        out.L.push_back(out.L.back() + static_cast<std::int32_t>(d));
    }
    out.validate();
    // corner_vertex is derived data; rebuild it via the tree
    LabeledPTree theta = decode_contour(out.C, out.L, p);
    return contour_and_labels(theta);
}

// --- samplers ------------------------------------------------------------

// Galton-Watson generation of preorder child counts of the full tree,
// aborting as soon as the black count exceeds n.
static bool gw_attempt(std::int32_t p, std::int64_t n, Rng& rng,
                       std::vector<std::int32_t>& deg) {
    deg.clear();
    const double beta = 1.0 / static_cast<double>(p);
    std::int64_t blacks = 0;
    // stack entries: >=0 means a white vertex to expand is pending (value
    // unused); -1 means a black vertex is pending
    std::vector<std::int8_t> st;
    st.push_back(1);
    while (!st.empty()) {
        std::int8_t kind = st.back();
        st.pop_back();
        if (kind == 1) {  // white
            auto kk = rng.geometric(beta);
            if (blacks + kk > n) return false;
            blacks += kk;
            deg.push_back(static_cast<std::int32_t>(kk));
            for (std::int64_t j = 0; j < kk; ++j) st.push_back(0);
        } else {  // black: exactly p-1 white children
            deg.push_back(p - 1);
            for (std::int32_t j = 0; j < p - 1; ++j) st.push_back(1);
        }
    }
    return blacks == n;
}

// Stars-and-bars: uniform composition of n into parts (b_1..b_parts), b_i>=0.
static std::vector<std::int64_t> uniform_composition(std::int64_t n, std::int64_t parts,
                                                     Rng& rng) {
    // choose parts-1 bar slots among n + parts - 1
    std::vector<std::int64_t> bars = rng.k_subset(parts - 1, n + parts - 1);
    std::vector<std::int64_t> out(parts);
    std::int64_t prev = -1;
    for (std::int64_t j = 0; j < parts - 1; ++j) {
        out[j] = bars[static_cast<std::size_t>(j)] - prev - 1;
        prev = bars[static_cast<std::size_t>(j)];
    }
    out[parts - 1] = (n + parts - 1) - prev - 1;
    return out;
}

// Exact sampler: uniform composition for the white-reduced degree sequence,
// cycle-lemma rotation at the first minimum of the Lukasiewicz path, then
// expansion to the full bipartite tree.
static PlaneTree exact_ptree(std::int32_t p, std::int64_t n, Rng& rng) {
    const std::int64_t N = (p - 1) * n + 1;  // white count
    std::vector<std::int64_t> b = uniform_composition(n, N, rng);
    // rotate so the Lukasiewicz path (steps (p-1)b_i - 1) stays >= 0 until the end
    std::int64_t best = 0, s = 0, best_s = 1;
    for (std::int64_t i = 0; i < N; ++i) {
        s += (p - 1) * b[static_cast<std::size_t>(i)] - 1;
        if (s < best_s) {
            best_s = s;
            best = i + 1;
        }
    }
    if (best == N) best = 0;
    // expand rotated white-reduced preorder to full-tree preorder degrees;
    // whites consume the next rotated composition entry, blacks emit p-1
    std::vector<std::int32_t> deg;
    deg.reserve(static_cast<std::size_t>(N + n));
    auto rotated = [&](std::int64_t j) {
        return b[static_cast<std::size_t>((best + j) % N)];
    };
    std::vector<std::int8_t> tokens;
    tokens.push_back(1);
    std::int64_t consumed = 0;
    while (!tokens.empty()) {
        std::int8_t kind = tokens.back();
        tokens.pop_back();
        if (kind == 1) {
            std::int64_t kk = rotated(consumed++);
            deg.push_back(static_cast<std::int32_t>(kk));
            for (std::int64_t j = 0; j < kk; ++j) tokens.push_back(0);
        } else {
            deg.push_back(p - 1);
            for (std::int32_t j = 0; j < p - 1; ++j) tokens.push_back(1);
        }
    }
    RM_CHECK(consumed == N, "exact sampler: degree sequence not fully consumed");
    return PlaneTree::from_preorder_degrees(deg);
}

PlaneTree sample_uniform_ptree(std::int32_t p, std::int64_t n, Rng& rng, PTreeMethod method) {
    RM_CHECK(p >= 2 && n >= 1, "sample_uniform_ptree: need p >= 2, n >= 1");
    if (method == PTreeMethod::Auto)
        method = n <= 512 ? PTreeMethod::GaltonWatson : PTreeMethod::Exact;
    if (method == PTreeMethod::Exact) return exact_ptree(p, n, rng);
    std::vector<std::int32_t> deg;
    while (!gw_attempt(p, n, rng, deg)) {
    }
    return PlaneTree::from_preorder_degrees(deg);
}

LabeledPTree sample_admissible_labels(const PlaneTree& tree, std::int32_t p, Rng& rng) {
    LabeledPTree out;
    out.tree = tree;
    out.p = p;
    out.label.assign(tree.size(), 0);
    std::int32_t blacks = 0;
    for (std::int32_t v = 0; v < tree.size(); ++v) {
        if ((tree.depth[v] & 1) == 0) continue;  // labels assigned at blacks
        ++blacks;
        std::int32_t parent_label = out.label[tree.parent[v]];
        // uniform (d_0..d_{p-1}), d_i >= -1, sum 0, via a (p-1)-subset of {0..2p-2}
        std::vector<std::int64_t> bars = rng.k_subset(p - 1, 2 * p - 1);
        std::int32_t cur = parent_label;
        std::int64_t prev = -1;
        std::int32_t j = 0;
        for (std::int32_t c = tree.first_child[v]; c >= 0; c = tree.next_sibling[c], ++j) {
            std::int64_t gap = bars[static_cast<std::size_t>(j)] - prev - 1;
            prev = bars[static_cast<std::size_t>(j)];
            cur += static_cast<std::int32_t>(gap) - 1;  // d_j = e_j - 1
            out.label[c] = cur;
        }
    }
    out.n_black = blacks;
    return out;
}

// --- enumeration ----------------------------------------------------------

std::vector<std::vector<std::int32_t>> enumerate_increment_vectors(std::int32_t p) {
    std::vector<std::vector<std::int32_t>> out;
    std::vector<std::int32_t> cur(p);
    // remaining entries are all >= -1, so sum + d must stay >= -(p-1-j)
    std::function<void(std::int32_t, std::int32_t)> rec = [&](std::int32_t j, std::int32_t sum) {
        if (j == p) {
            if (sum == 0) out.push_back(cur);
            return;
        }
        std::int32_t remaining = p - 1 - j;
        for (std::int32_t d = -1; d <= remaining - sum; ++d) {
            cur[j] = d;
            rec(j + 1, sum + d);
        }
    };
    rec(0, 0);
    return out;
}

std::vector<PlaneTree> enumerate_ptree_shapes(std::int32_t p, std::int64_t n,
                                              std::int64_t cap) {
    const std::int64_t N = (p - 1) * n + 1;
    std::vector<PlaneTree> out;
    std::vector<std::int64_t> b(static_cast<std::size_t>(N));
    // enumerate white-reduced compositions with valid Lukasiewicz prefixes
    std::function<void(std::int64_t, std::int64_t, std::int64_t)> rec =
        [&](std::int64_t i, std::int64_t used, std::int64_t prefix) {
            if (i == N) {
                if (used != n) return;
                if (static_cast<std::int64_t>(out.size()) >= cap)
                    throw CapExceededError("p-tree shape enumeration exceeds cap");
                // expand to full-tree degrees
                std::vector<std::int32_t> deg;
                std::vector<std::int8_t> tokens{1};
                std::int64_t consumed = 0;
                while (!tokens.empty()) {
                    std::int8_t kind = tokens.back();
                    tokens.pop_back();
                    if (kind == 1) {
                        std::int64_t kk = b[static_cast<std::size_t>(consumed++)];
                        deg.push_back(static_cast<std::int32_t>(kk));
                        for (std::int64_t j = 0; j < kk; ++j) tokens.push_back(0);
                    } else {
                        deg.push_back(p - 1);
                        for (std::int32_t j = 0; j < p - 1; ++j) tokens.push_back(1);
                    }
                }
                out.push_back(PlaneTree::from_preorder_degrees(deg));
                return;
            }
            bool last = (i == N - 1);
            for (std::int64_t bi = 0; bi + used <= n; ++bi) {
                std::int64_t pref = prefix + (p - 1) * bi - 1;
                if (last ? pref != -1 : pref < 0) continue;
                b[static_cast<std::size_t>(i)] = bi;
                rec(i + 1, used + bi, pref);
            }
        };
    rec(0, 0, 0);
    return out;
}

std::vector<LabeledPTree> enumerate_labeled_ptrees(std::int32_t p, std::int64_t n,
                                                   std::int64_t cap) {
    RM_CHECK(p >= 2 && n >= 1, "enumerate_labeled_ptrees: need p >= 2, n >= 1");
    auto shapes = enumerate_ptree_shapes(p, n, cap);
    auto incs = enumerate_increment_vectors(p);
    const auto nv = static_cast<std::int64_t>(incs.size());
    double total = static_cast<double>(shapes.size()) * std::pow(static_cast<double>(nv),
                                                                 static_cast<double>(n));
    if (total > static_cast<double>(cap))
        throw CapExceededError("labeled p-tree enumeration exceeds cap");
    std::vector<LabeledPTree> out;
    out.reserve(static_cast<std::size_t>(total));
    for (const auto& shape : shapes) {
        // blacks in preorder
        std::vector<std::int32_t> blacks;
        for (std::int32_t v = 0; v < shape.size(); ++v)
            if (shape.depth[v] & 1) blacks.push_back(v);
        std::vector<std::int64_t> odo(blacks.size(), 0);
        for (;;) {
            LabeledPTree theta;
            theta.tree = shape;
            theta.p = p;
            theta.n_black = static_cast<std::int32_t>(blacks.size());
            theta.label.assign(shape.size(), 0);
            for (std::size_t bi = 0; bi < blacks.size(); ++bi) {
                const auto& d = incs[static_cast<std::size_t>(odo[bi])];
                std::int32_t b = blacks[bi];
                std::int32_t cur = theta.label[shape.parent[b]];
                std::int32_t j = 0;
                for (std::int32_t c = shape.first_child[b]; c >= 0; c = shape.next_sibling[c], ++j) {
                    cur += d[static_cast<std::size_t>(j)];
                    theta.label[c] = cur;
                }
            }
            out.push_back(std::move(theta));
            // odometer
            std::size_t pos = 0;
            while (pos < odo.size()) {
                if (++odo[pos] < nv) break;
                odo[pos++] = 0;
            }
            if (pos == odo.size()) break;
            if (blacks.empty()) break;
        }
    }
    std::sort(out.begin(), out.end(), [](const LabeledPTree& a, const LabeledPTree& b) {
        ContourCoding ca = contour_and_labels(a), cb = contour_and_labels(b);
        if (ca.C != cb.C) return ca.C < cb.C;
        return ca.L < cb.L;
    });
    return out;
}

// --- branching subtrees ----------------------------------------------------

// Copy the subtree rooted at `root` (optionally re-rooted under a copy of its
// white parent) into a fresh LabeledPTree, shifting labels so the root is 0.
static LabeledPTree extract_branch(const LabeledPTree& theta, std::int32_t white_root,
                                   std::int32_t black_child) {
    // white_root is copied with the single black child `black_child` when
    // black_child >= 0; otherwise white_root's whole subtree is taken.
    LabeledPTree out;
    out.p = theta.p;
    out.tree.parent.clear();
    std::vector<std::int32_t> last_child;
    auto add = [&](std::int32_t dst_parent) {
        std::int32_t id = static_cast<std::int32_t>(out.tree.parent.size());
        out.tree.parent.push_back(dst_parent);
        out.tree.first_child.push_back(-1);
        out.tree.next_sibling.push_back(-1);
        out.tree.depth.push_back(dst_parent < 0 ? 0 : out.tree.depth[dst_parent] + 1);
        last_child.push_back(-1);
        out.label.push_back(0);
        if (dst_parent >= 0) {
            if (last_child[dst_parent] < 0)
                out.tree.first_child[dst_parent] = id;
            else
                out.tree.next_sibling[last_child[dst_parent]] = id;
            last_child[dst_parent] = id;
        }
        return id;
    };
    std::int32_t shift = theta.label[white_root];
    std::int32_t root_id = add(-1);
    out.label[root_id] = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> stack;  // (src, dst_parent)
    if (black_child >= 0) {
        stack.emplace_back(black_child, root_id);
    } else {
        std::vector<std::int32_t> cs = theta.tree.children(white_root);
        for (auto it = cs.rbegin(); it != cs.rend(); ++it) stack.emplace_back(*it, root_id);
    }
    std::int32_t blacks = 0;
    while (!stack.empty()) {
        auto [src, dstp] = stack.back();
        stack.pop_back();
        std::int32_t id = add(dstp);
        if (out.tree.depth[id] & 1)
            ++blacks;
        else
            out.label[id] = theta.label[src] - shift;
        std::vector<std::int32_t> cs = theta.tree.children(src);
        for (auto it = cs.rbegin(); it != cs.rend(); ++it) stack.emplace_back(*it, id);
    }
    out.n_black = blacks;
    return out;
}

std::vector<BranchSubtree> branching_subtrees(const LabeledPTree& theta,
                                              const ContourCoding& coding,
                                              std::int64_t corner_index, bool right) {
    const std::int64_t pn = coding.length();
    RM_CHECK(corner_index >= 0 && corner_index <= pn, "corner index out of range");
    std::int32_t v = coding.corner_vertex[static_cast<std::size_t>(corner_index)];
    // number of v's corners strictly before corner_index = completed child blocks
    std::int32_t completed = 0;
    for (std::int64_t j = 0; j < corner_index; ++j)
        if (coding.corner_vertex[static_cast<std::size_t>(j)] == v) ++completed;
    // ancestral line: whites a_0(root)..a_m(=v), blacks between
    std::vector<std::int32_t> line_whites, line_blacks;
    for (std::int32_t u = v; u >= 0; u = theta.tree.parent[u]) {
        if ((theta.tree.depth[u] & 1) == 0)
            line_whites.push_back(u);
        else
            line_blacks.push_back(u);
    }
    std::reverse(line_whites.begin(), line_whites.end());
    std::reverse(line_blacks.begin(), line_blacks.end());
    const auto m = static_cast<std::int32_t>(line_whites.size()) - 1;

    std::vector<BranchSubtree> out;
    auto add_black_branch = [&](std::int32_t u, std::int32_t b) {
        BranchSubtree bs;
        bs.right = right;
        bs.level = theta.tree.depth[u] / 2;
        bs.root_is_copy = true;
        bs.subtree = extract_branch(theta, u, b);
        out.push_back(std::move(bs));
    };
    auto add_white_branch = [&](std::int32_t w) {
        BranchSubtree bs;
        bs.right = right;
        bs.level = theta.tree.depth[w] / 2;
        bs.root_is_copy = false;
        bs.subtree = extract_branch(theta, w, -1);
        out.push_back(std::move(bs));
    };
    for (std::int32_t t = 0; t <= m; ++t) {
        std::int32_t u = line_whites[static_cast<std::size_t>(t)];
        std::int32_t q = 0;
        for (std::int32_t b = theta.tree.first_child[u]; b >= 0;
             b = theta.tree.next_sibling[b], ++q) {
            bool is_path = t < m && b == line_blacks[static_cast<std::size_t>(t)];
            if (is_path) {
                // white siblings around the next line white, inside this black
                std::int32_t anext = line_whites[static_cast<std::size_t>(t) + 1];
                bool before = true;
                for (std::int32_t w = theta.tree.first_child[b]; w >= 0;
                     w = theta.tree.next_sibling[w]) {
                    if (w == anext) {
                        before = false;
                        continue;
                    }
                    if (before == !right) add_white_branch(w);
                }
                continue;
            }
            bool on_left;
            if (t < m) {
                std::int32_t qt = 0;
                for (std::int32_t bb = theta.tree.first_child[u];
                     bb != line_blacks[static_cast<std::size_t>(t)];
                     bb = theta.tree.next_sibling[bb])
                    ++qt;
                on_left = q < qt;
            } else {
                on_left = q < completed;
            }
            if (on_left == !right) add_black_branch(u, b);
        }
    }
    return out;
}

}  // namespace randmaps
