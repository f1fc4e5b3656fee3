#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "randmaps/stats.hpp"
#include "randmaps/bdg.hpp"
#include "randmaps/tri.hpp"
#include "support/ttree_enum.hpp"

using namespace randmaps;
using namespace randmaps::testsupport;

namespace {
void check_triangulation(const TriMap& tm) {
    const auto& m = tm.map;
    CHECK(m.vertex_count() == tm.n_vertices);
    CHECK(m.edge_count() == 3 * (tm.n_vertices - 2));
    CHECK(m.face_count() == 2 * (tm.n_vertices - 2));
    CHECK(m.euler_characteristic() == 2);
    for (const auto& f : m.faces()) CHECK(f.degree == 3);
}

void check_class(const TriMap& tm) {
    auto df = bfs_distances(tm.map, tm.map.pointed);
    std::uint32_t eminus = tm.map.vertex_of[tm.map.root_half];
    std::uint32_t eplus = tm.map.vertex_of[tm.map.alpha[tm.map.root_half]];
    if (tm.positive)
        CHECK(df.d[eplus] == df.d[eminus] + 1);
    else
        CHECK(df.d[eplus] == df.d[eminus]);
}

void check_eq25(const TriMap& tm) {
    auto df = bfs_distances(tm.map, tm.map.pointed);
    for (std::int64_t i = 0; i < tm.coding.length(); ++i) {
        if (!tm.corner_is_type1(i)) continue;
        CHECK(df.d[tm.corner_map_vertex(i)] ==
              tm.coding.L[static_cast<std::size_t>(i)] - tm.min_label + 1);
    }
}

void check_eq26(const TriMap& tm, Rng& rng, int sources) {
    const std::int64_t k = tm.coding.length();
    for (int s = 0; s < sources; ++s) {
        std::int64_t i = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(k)));
        if (!tm.corner_is_type1(i)) continue;
        auto df = bfs_distances(tm.map, tm.corner_map_vertex(i));
        for (std::int64_t j = 0; j < k; ++j) {
            if (!tm.corner_is_type1(j)) continue;
            CHECK(df.d[tm.corner_map_vertex(j)] <= cactus_bound(tm.coding, i, j));
        }
    }
}
}  // namespace

TEST_CASE("constants match the closed forms") {
    auto c = verify_tri_constants();
    const double s3 = std::sqrt(3.0);
    CHECK(std::abs(c.spectral_radius - 1.0) < 1e-12);
    CHECK(std::abs(c.lambda32 - (3.0 - s3) / 4.0) < 1e-12);
    CHECK(std::abs(c.kappa32 - std::pow(3.0, 0.25)) < 1e-12);
    CHECK(std::abs(c.sigma_sq - (s3 - 1.0) / 8.0) < 1e-12);
    CHECK(std::abs(c.a_q_b - (6.0 - 3.0 * s3) * (6.0 - s3) / 8.0) < 1e-12);
    double asum = c.a[0] + c.a[1] + c.a[2] + c.a[3];
    CHECK(std::abs(asum - 1.0) < 1e-12);
    double ab = 0;
    for (int i = 0; i < 4; ++i) ab += c.a[i] * c.b[i];
    CHECK(std::abs(ab - 1.0) < 1e-12);
    // closed-form eigenvectors
    CHECK(std::abs(c.a[0] - 1.0 / (6 - s3)) < 1e-12);
    CHECK(std::abs(c.a[1] - (3 - s3) / (6 - s3)) < 1e-12);
    CHECK(std::abs(c.a[2] - (s3 - 1) / (6 - s3)) < 1e-12);
    CHECK(std::abs(c.b[0] - (6 - s3) / 4 * (s3 - 1)) < 1e-12);
    CHECK(std::abs(c.b[1] - (6 - s3) / 4) < 1e-12);
    // consistency across the two encodings: kappa_p = c_{2p}, and the
    // triangulation constant in face units is c_3
    for (std::int32_t p : {2, 3, 4, 7}) CHECK(std::abs(kappa_p(p) - c_q(2 * p)) < 1e-12);
    CHECK(std::abs(c.kappa32 * std::pow(2.0, 0.25) - c_q(3)) < 1e-12);
    CHECK(std::abs(std::pow(2.0 * 3.0, 0.25) - c_q(3)) < 1e-12);
    CHECK(std::abs(lambda_p(2) - 0.5 * std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("enumeration oracle: smallest classes have 4 labeled trees each") {
    auto pos = enumerate_labeled_ttrees(3, 1);
    auto nul = enumerate_labeled_ttrees(3, 2);
    CHECK(pos.size() == 4);
    CHECK(nul.size() == 4);
}

TEST_CASE("exhaustive bijection on T_3 and T_4, both classes") {
    for (std::int64_t n : {3, 4}) {
        for (std::int32_t rt : {1, 2}) {
            auto all = enumerate_labeled_ttrees(n, rt);
            REQUIRE(!all.empty());
            std::set<std::vector<std::int32_t>> codes;
            Rng rng(9);
            for (const auto& th : all) {
                auto tm = ttree_to_triangulation(th);
                CHECK(tm.n_vertices == n);
                check_triangulation(tm);
                check_class(tm);
                check_eq25(tm);
                check_eq26(tm, rng, 2);
                codes.insert(tm.map.canonical_code());
            }
            CHECK(codes.size() == all.size());  // injectivity
        }
    }
}

TEST_CASE("sampled conditioned trees: structure, rate decreases, labels") {
    Rng rng(123);
    // structural validity and exact type-1 count
    for (std::int64_t n : {3, 6, 12}) {
        for (std::int32_t rt : {1, 2}) {
            auto s = sample_conditioned_ttree(n, rt, rng);
            CHECK(s.tree.type_count[1] == n - 1);
            auto labeled = sample_admissible_tlabels(s.tree, rng);
            labeled.validate();
            CHECK(labeled.label[0] == 0);
        }
    }
    // acceptance rate: reported, and decreasing with n (the measured slope is
    // close to -3/2, the conditioned-GW total-progeny exponent)
    std::vector<double> logn, lograte;
    for (std::int64_t n : {16, 64, 256}) {
        std::int64_t attempts = 0;
        const int reps = 60;
        for (int r = 0; r < reps; ++r) attempts += sample_conditioned_ttree(n, 1, rng).attempts;
        logn.push_back(std::log(static_cast<double>(n)));
        lograte.push_back(std::log(static_cast<double>(reps) / static_cast<double>(attempts)));
    }
    auto fit = fit_line(logn, lograte);
    CHECK(fit.slope < -0.5);
    CHECK(fit.slope > -2.5);
}

TEST_CASE("shape frequencies match the enumeration oracle (weighted by labelings)") {
    // Conditioned-GW shapes are distributed like the shape marginal of the
    // uniform law on labeled trees, i.e. proportionally to 2^(label sites).
    auto shapes = enumerate_ttree_shapes(5, 1);
    REQUIRE(shapes.size() >= 3);
    std::map<std::vector<std::int32_t>, std::size_t> index;
    std::vector<double> weights;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        index[shapes[i].tree.preorder_degrees()] = i;
        weights.push_back(std::pow(2.0, static_cast<double>(shapes[i].free_label_sites())));
    }
    Rng rng(2024);
    std::vector<std::int64_t> obs(shapes.size(), 0);
    for (int i = 0; i < 40000; ++i) {
        auto s = sample_conditioned_ttree(5, 1, rng);
        auto it = index.find(s.tree.tree.preorder_degrees());
        REQUIRE(it != index.end());
        obs[it->second]++;
    }
    CHECK(chi_square_pvalue(obs, weights) > 0.01);
}

TEST_CASE("label increment variance 1/4") {
    Rng rng(5);
    std::int64_t sites[2] = {0, 0};
    double sum[2] = {0, 0}, sumsq[2] = {0, 0};
    while (sites[0] + sites[1] < 100000) {
        auto s = sample_conditioned_ttree(20, 1, rng);
        auto t = sample_admissible_tlabels(s.tree, rng);
        for (std::int32_t v = 0; v < t.tree.size(); ++v) {
            if (t.is_white(v)) continue;
            int kind;
            if (t.type[v] == 3)
                kind = 0;
            else if (t.type[v] == 4 && t.tree.child_count(v) == 1)
                kind = 1;
            else
                continue;
            double inc = t.label[t.tree.first_child[v]] - t.label[t.tree.parent[v]];
            sum[kind] += inc;
            sumsq[kind] += inc * inc;
            ++sites[kind];
        }
    }
    for (int kind = 0; kind < 2; ++kind) {
        double mean = sum[kind] / static_cast<double>(sites[kind]);
        double var = sumsq[kind] / static_cast<double>(sites[kind]) - mean * mean;
        CHECK(std::abs(var - 0.25) < 0.01);
    }
}

TEST_CASE("medium random triangulations: all identities") {
    Rng rng(31);
    for (std::int64_t n : {50, 400}) {
        for (std::int32_t rt : {1, 2}) {
            auto s = sample_conditioned_ttree(n, rt, rng);
            auto th = sample_admissible_tlabels(s.tree, rng);
            auto tm = ttree_to_triangulation(th);
            check_triangulation(tm);
            check_class(tm);
            check_eq25(tm);
            check_eq26(tm, rng, 3);
        }
    }
}

TEST_CASE("half-integer distance extension") {
    Rng rng(77);
    auto s = sample_conditioned_ttree(40, 1, rng);
    auto th = sample_admissible_tlabels(s.tree, rng);
    auto tm = ttree_to_triangulation(th);
    auto hm = half_distance_extension(tm);
    REQUIRE(hm.midpoints > 0);
    // degenerate successor pair: d = 1/2 exactly
    for (std::int64_t j = 0; j < hm.midpoints; ++j)
        if (hm.succ[static_cast<std::size_t>(j)][0] == hm.succ[static_cast<std::size_t>(j)][1]) {
            CHECK(hm.doubled_distance(hm.map_vertices + j,
                                      hm.succ[static_cast<std::size_t>(j)][0]) == 1);
        }
    // restriction to map vertices is plain BFS
    auto df = bfs_distances(tm.map, 0);
    for (std::int64_t v = 0; v < hm.map_vertices; ++v)
        CHECK(hm.doubled_distance(0, v) == 2 * df.d[static_cast<std::size_t>(v)]);
    // symmetry and triangle inequality on random triples
    const std::int64_t N = hm.node_count();
    for (int t = 0; t < 10000; ++t) {
        std::int64_t a = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(N)));
        std::int64_t b = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(N)));
        std::int64_t c = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(N)));
        CHECK(hm.doubled_distance(a, b) == hm.doubled_distance(b, a));
        CHECK(hm.doubled_distance(a, c) <= hm.doubled_distance(a, b) + hm.doubled_distance(b, c));
        if (a == b) CHECK(hm.doubled_distance(a, b) == 0);
    }
}
