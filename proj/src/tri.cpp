#include "randmaps/tri.hpp"

#include <algorithm>
#include <cmath>

#include "randmaps/detail/corner_map.hpp"

namespace randmaps {

// White contour of a T-tree: same walk as for p-trees (white = even depth).
static ContourCoding ttree_contour(const LabeledTTree& theta) {
    ContourCoding out;
    out.p = 0;
    out.n = theta.type_count[1];
    struct Item {
        std::int32_t v;
        bool expand;
    };
    std::vector<Item> st;
    std::vector<std::int32_t> buf, buf2;
    st.push_back({0, true});
    while (!st.empty()) {
        Item it = st.back();
        st.pop_back();
        out.corner_vertex.push_back(it.v);
        out.C.push_back(theta.tree.depth[it.v] / 2);
        out.L.push_back(theta.label[it.v]);
        if (!it.expand) continue;
        buf.clear();
        for (std::int32_t b = theta.tree.first_child[it.v]; b >= 0;
             b = theta.tree.next_sibling[b])
            buf.push_back(b);
        for (auto bi = buf.rbegin(); bi != buf.rend(); ++bi) {
            st.push_back({it.v, false});
            buf2.clear();
            for (std::int32_t w = theta.tree.first_child[*bi]; w >= 0;
                 w = theta.tree.next_sibling[w])
                buf2.push_back(w);
            for (auto wi = buf2.rbegin(); wi != buf2.rend(); ++wi) st.push_back({*wi, true});
        }
    }
    return out;
}

TriMap ttree_to_triangulation(const LabeledTTree& theta) {
    theta.validate();
    TriMap tm;
    tm.coding = ttree_contour(theta);
    const auto k = tm.coding.length();
    std::vector<std::int32_t> labels(tm.coding.L.begin(), tm.coding.L.end() - 1);
    detail::CornerSweep sw = detail::corner_sweep(labels);
    tm.min_label = sw.min_label;

    // pre-merge vertex ids: whites (types 1 and 2) in preorder, point last
    std::vector<std::uint32_t> white_id(theta.tree.size(), UINT32_MAX);
    std::uint32_t next = 0;
    for (std::int32_t v = 0; v < theta.tree.size(); ++v)
        if (theta.is_white(v)) white_id[static_cast<std::size_t>(v)] = next++;
    const std::uint32_t point = next;
    const std::int64_t V0 = point + 1;
    std::vector<std::uint32_t> corner_vtx(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i)
        corner_vtx[static_cast<std::size_t>(i)] =
            white_id[static_cast<std::size_t>(tm.coding.corner_vertex[static_cast<std::size_t>(i)])];
    detail::CornerMapParts parts = detail::assemble_corner_map(sw, corner_vtx, V0, point);

    // erase type-2 vertices; their two outgoing arcs merge into one edge
    std::vector<std::uint32_t> alpha = std::move(parts.alpha);
    std::vector<std::int8_t> half_dead(alpha.size(), 0);
    std::vector<std::int8_t> vertex_dead(static_cast<std::size_t>(V0), 0);
    std::vector<std::array<std::int64_t, 2>> type2_corners(theta.tree.size(), {-1, -1});
    for (std::int64_t i = 0; i < k; ++i) {
        std::int32_t tv = tm.coding.corner_vertex[static_cast<std::size_t>(i)];
        if (theta.type[tv] != 2) continue;
        auto& cs = type2_corners[static_cast<std::size_t>(tv)];
        if (cs[0] < 0)
            cs[0] = i;
        else
            cs[1] = i;
    }
    auto target_vertex_premerge = [&](std::int64_t corner) -> std::uint32_t {
        std::int64_t s = sw.succ[static_cast<std::size_t>(corner)];
        return s < 0 ? point : corner_vtx[static_cast<std::size_t>(s)];
    };
    for (std::int32_t tv = 0; tv < theta.tree.size(); ++tv) {
        if (theta.type[tv] != 2) continue;
        auto cs = type2_corners[static_cast<std::size_t>(tv)];
        RM_CHECK(cs[0] >= 0 && cs[1] >= 0, "type-2 vertex without two corners");
        std::uint32_t u = white_id[static_cast<std::size_t>(tv)];
        RM_CHECK(parts.rot[u].size() == 2, "type-2 vertex received an arc");
        std::uint32_t far1 = static_cast<std::uint32_t>(2 * cs[0] + 1);
        std::uint32_t far2 = static_cast<std::uint32_t>(2 * cs[1] + 1);
        alpha[far1] = far2;
        alpha[far2] = far1;
        half_dead[static_cast<std::size_t>(2 * cs[0])] = 1;
        half_dead[static_cast<std::size_t>(2 * cs[1])] = 1;
        vertex_dead[u] = 1;
        tm.mid_successors.push_back({target_vertex_premerge(cs[0]), target_vertex_premerge(cs[1])});
        tm.mid_tree_vertex.push_back(tv);
    }

    // compact halves and vertices
    std::vector<std::uint32_t> half_new(alpha.size(), UINT32_MAX);
    std::uint32_t hn = 0;
    for (std::uint32_t h = 0; h < alpha.size(); ++h)
        if (!half_dead[h]) half_new[h] = hn++;
    std::vector<std::uint32_t> vert_new(static_cast<std::size_t>(V0), UINT32_MAX);
    std::uint32_t vn = 0;
    for (std::uint32_t v = 0; v < V0; ++v)
        if (!vertex_dead[v]) vert_new[v] = vn++;
    PlanarMap& map = tm.map;
    map.alpha.assign(hn, 0);
    std::vector<std::vector<std::uint32_t>> rot(vn);
    for (std::uint32_t h = 0; h < alpha.size(); ++h)
        if (!half_dead[h]) map.alpha[half_new[h]] = half_new[alpha[h]];
    for (std::uint32_t v = 0; v < V0; ++v) {
        if (vertex_dead[v]) continue;
        for (std::uint32_t h : parts.rot[v]) {
            RM_CHECK(!half_dead[h], "live vertex holds a dead half");
            rot[vert_new[v]].push_back(half_new[h]);
        }
    }
    map.set_rotations(rot);
    map.pointed = vert_new[point];
    map.vertex_origin.assign(vn, PlanarMap::ORIGIN_POINT);
    tm.white_map_vertex.assign(theta.tree.size(), UINT32_MAX);
    for (std::int32_t v = 0; v < theta.tree.size(); ++v) {
        if (!theta.is_white(v) || theta.type[v] != 1) continue;
        std::uint32_t mv = vert_new[white_id[static_cast<std::size_t>(v)]];
        tm.white_map_vertex[static_cast<std::size_t>(v)] = mv;
        map.vertex_origin[mv] = v;
    }
    for (auto& s : tm.mid_successors) {
        s[0] = vert_new[s[0]];
        s[1] = vert_new[s[1]];
    }

    // root edge; the target of the corner-0 arc is the origin side
    if (theta.type[0] == 1) {
        tm.positive = true;
        map.root_half = half_new[1];  // far half of arc 0, targets point at the root
    } else {
        tm.positive = false;
        auto cs = type2_corners[0];
        map.root_half = half_new[static_cast<std::uint32_t>(2 * cs[0] + 1)];
    }
    tm.n_vertices = theta.type_count[1] + 1;
    map.validate();
    return tm;
}

HalfMetric half_distance_extension(const TriMap& tm) {
    HalfMetric hm;
    hm.map_vertices = tm.map.vertex_count();
    hm.midpoints = static_cast<std::int64_t>(tm.mid_successors.size());
    hm.succ = tm.mid_successors;
    hm.base.resize(static_cast<std::size_t>(hm.map_vertices));
    for (std::int64_t v = 0; v < hm.map_vertices; ++v)
        hm.base[static_cast<std::size_t>(v)] =
            bfs_distances(tm.map, static_cast<std::uint32_t>(v)).d;
    return hm;
}

std::int32_t HalfMetric::doubled_distance(std::int64_t a, std::int64_t b) const {
    if (a == b) return 0;
    auto base_d = [&](std::int64_t u, std::int64_t v) {
        return base[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
    };
    bool am = a >= map_vertices, bm = b >= map_vertices;
    if (!am && !bm) return 2 * base_d(a, b);
    if (am && !bm) {
        auto s = succ[static_cast<std::size_t>(a - map_vertices)];
        return 1 + 2 * std::min(base_d(s[0], b), base_d(s[1], b));
    }
    if (!am && bm) return doubled_distance(b, a);
    auto s = succ[static_cast<std::size_t>(a - map_vertices)];
    auto t = succ[static_cast<std::size_t>(b - map_vertices)];
    std::int32_t m = base_d(s[0], t[0]);
    m = std::min(m, base_d(s[0], t[1]));
    m = std::min(m, base_d(s[1], t[0]));
    m = std::min(m, base_d(s[1], t[1]));
    return 2 + 2 * m;
}

// ---- constants -------------------------------------------------------------

static void mat_vec(const double m[4][4], const double x[4], double y[4], bool transpose) {
    for (int i = 0; i < 4; ++i) {
        y[i] = 0;
        for (int j = 0; j < 4; ++j) y[i] += (transpose ? m[j][i] : m[i][j]) * x[j];
    }
}

// dominant eigenpair by shifted power iteration (the mean matrix has period
// two, so iterate on M + I)
static double power_iteration(const double m[4][4], double v[4], bool transpose) {
    double x[4] = {1, 1, 1, 1};
    double lambda = 0;
    for (int it = 0; it < 200000; ++it) {
        double y[4];
        mat_vec(m, x, y, transpose);
        for (int i = 0; i < 4; ++i) y[i] += x[i];
        double norm = 0;
        for (int i = 0; i < 4; ++i) norm += y[i] * y[i];
        norm = std::sqrt(norm);
        for (int i = 0; i < 4; ++i) y[i] /= norm;
        double diff = 0;
        for (int i = 0; i < 4; ++i) diff = std::max(diff, std::abs(y[i] - x[i]));
        for (int i = 0; i < 4; ++i) x[i] = y[i];
        if (diff < 1e-15 && it > 10) break;
    }
    double y[4];
    mat_vec(m, x, y, transpose);
    double num = 0, den = 0;
    for (int i = 0; i < 4; ++i) {
        num += y[i] * x[i];
        den += x[i] * x[i];
    }
    lambda = num / den;
    for (int i = 0; i < 4; ++i) v[i] = x[i];
    return lambda;
}

TriConstants verify_tri_constants() {
    GwParams par;
    par.validate();
    TriConstants c{};
    const double geo_mean = par.beta / (1.0 - par.beta);
    double m[4][4] = {{0, 0, geo_mean, 0},
                      {0, 0, 0, 1},
                      {0, 1, 0, 0},
                      {par.alpha, 2 * (1 - par.alpha), 0, 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c.mean[i][j] = m[i][j];

    double b[4], a[4];
    c.spectral_radius = power_iteration(m, b, false);
    power_iteration(m, a, true);
    // normalize: a sums to one, a.b = 1
    double asum = a[0] + a[1] + a[2] + a[3];
    for (double& x : a) x /= asum;
    double ab = 0;
    for (int i = 0; i < 4; ++i) ab += a[i] * b[i];
    for (double& x : b) x /= ab;
    for (int i = 0; i < 4; ++i) {
        c.a[i] = a[i];
        c.b[i] = b[i];
    }

    // quadratic forms (second factorial moments of the offspring laws):
    // Q1(s) = E[N(N-1)] s_3^2 for the geometric count, Q4(s) = 2(1-alpha) s_2^2
    const double q1 = 2 * par.beta * par.beta / ((1 - par.beta) * (1 - par.beta));
    const double q4 = 2 * (1 - par.alpha);
    c.a_q_b = c.a[0] * q1 * c.b[2] * c.b[2] + c.a[3] * q4 * c.b[1] * c.b[1];
    c.lambda32 = std::sqrt(c.a_q_b * c.a[0]);
    // label-increment variance is 1/4 at type-3 sites and at single-child
    // type-4 sites
    c.sigma_sq = c.a[2] * c.b[1] * 0.25 + par.alpha * c.a[3] * c.b[0] * 0.25;
    c.kappa32 = std::sqrt(c.lambda32 / 2.0) / std::sqrt(c.sigma_sq);
    return c;
}

double lambda_p(std::int32_t p) {
    return 0.5 * std::sqrt(static_cast<double>(p) / static_cast<double>(p - 1));
}
double kappa_p(std::int32_t p) {
    return std::pow(9.0 / (4.0 * p * (p - 1.0)), 0.25);
}
double c_q(std::int32_t q) {
    if (q == 3) return std::pow(6.0, 0.25);
    RM_CHECK(q >= 4 && q % 2 == 0, "c_q defined for q = 3 and even q >= 4");
    return std::pow(9.0 / (static_cast<double>(q) * (q - 2.0)), 0.25);
}

}  // namespace randmaps
