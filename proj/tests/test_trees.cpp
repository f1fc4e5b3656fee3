#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "randmaps/labeled_ptree.hpp"
#include "randmaps/stats.hpp"

using namespace randmaps;

TEST_CASE("increment vectors match stars-and-bars counts") {
    CHECK(enumerate_increment_vectors(2).size() == 3);   // C(3,1)
    CHECK(enumerate_increment_vectors(3).size() == 10);  // C(5,2)
    CHECK(enumerate_increment_vectors(5).size() == 126); // C(9,4)
    for (const auto& d : enumerate_increment_vectors(3)) {
        std::int32_t s = 0;
        for (auto x : d) {
            CHECK(x >= -1);
            s += x;
        }
        CHECK(s == 0);
    }
    // p = 2: exactly the three stated pairs
    auto v2 = enumerate_increment_vectors(2);
    std::set<std::vector<std::int32_t>> got(v2.begin(), v2.end());
    std::set<std::vector<std::int32_t>> want{{-1, 1}, {0, 0}, {1, -1}};
    CHECK(got == want);
}

TEST_CASE("enumeration counts for small (p, n)") {
    CHECK(enumerate_labeled_ptrees(2, 1).size() == 3);
    CHECK(enumerate_ptree_shapes(2, 2).size() == 2);
    CHECK(enumerate_labeled_ptrees(2, 2).size() == 9 * 2);
    CHECK(enumerate_ptree_shapes(2, 3).size() == 5);
    CHECK(enumerate_ptree_shapes(2, 4).size() == 14);
    CHECK(enumerate_ptree_shapes(3, 1).size() == 1);
    CHECK(enumerate_labeled_ptrees(3, 1).size() == 10);
    CHECK_THROWS_AS(enumerate_labeled_ptrees(2, 10, 100), CapExceededError);
    // duplicate-free
    auto all = enumerate_labeled_ptrees(2, 3);
    std::set<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>> codes;
    for (const auto& th : all) {
        auto c = contour_and_labels(th);
        codes.insert({c.C, c.L});
    }
    CHECK(codes.size() == all.size());
}

TEST_CASE("contour coding basics and hand-traced cases") {
    // (p=2, n=1, l_11 = -1) -> C = (0,1,0), L = (0,-1,0)
    for (const auto& th : enumerate_labeled_ptrees(2, 1)) {
        auto c = contour_and_labels(th);
        REQUIRE(c.length() == 2);
        CHECK(c.C == std::vector<std::int32_t>{0, 1, 0});
        if (th.label[2] == -1) CHECK(c.L == std::vector<std::int32_t>{0, -1, 0});
    }
    // the worked 3-tree with n = 3 black vertices: root with two black
    // children, the first carrying a deeper black under its first white;
    // coding length pn = 9
    {
        std::vector<std::int32_t> deg{2, 2, 1, 2, 0, 0, 0, 2, 0, 0};
        LabeledPTree th;
        th.tree = PlaneTree::from_preorder_degrees(deg);
        th.p = 3;
        th.n_black = 3;
        th.label.assign(10, 0);
        th.validate();
        auto c = contour_and_labels(th);
        CHECK(c.length() == 9);
        CHECK(c.C.front() == 0);
        CHECK(c.C.back() == 0);
        CHECK(*std::max_element(c.C.begin(), c.C.end()) == 2);
    }
    Rng rng(7);
    auto th = sample_labeled_ptree(3, 3, rng);
    auto c = contour_and_labels(th);
    CHECK(c.length() == 9);
}

TEST_CASE("decode rejects malformed codings") {
    CHECK_THROWS_AS(decode_contour({0, 2, 0}, {0, 0, 0}, 2), MalformedCodingError);
    CHECK_THROWS_AS(decode_contour({0, 1, 0}, {0, -2, 0}, 2), MalformedCodingError);
    CHECK_THROWS_AS(decode_contour({0, 1, 1, 0}, {0, 0, 0, 0}, 2), MalformedCodingError);
    // C = (0,1,0), L = (0,0,0) decodes to the n=1 tree with label 0
    auto th = decode_contour({0, 1, 0}, {0, 0, 0}, 2);
    CHECK(th.n_black == 1);
    CHECK(th.label[2] == 0);
}

TEST_CASE("encode/decode round trip on random trees") {
    Rng rng(42);
    for (std::int32_t p : {2, 3, 5}) {
        for (int rep = 0; rep < 400; ++rep) {
            auto th = sample_labeled_ptree(p, 1 + static_cast<std::int64_t>(rng.uniform_below(12)), rng);
            th.validate();
            auto c = contour_and_labels(th);
            c.validate();
            auto back = decode_contour(c, p);
            auto c2 = contour_and_labels(back);
            CHECK(c.C == c2.C);
            CHECK(c.L == c2.L);
        }
    }
}

TEST_CASE("RMLT serialization round trip") {
    Rng rng(5);
    auto th = sample_labeled_ptree(3, 17, rng);
    auto c = contour_and_labels(th);
    auto bytes = serialize_coding(c);
    CHECK(bytes[0] == 'R');
    auto c2 = deserialize_coding(bytes);
    CHECK(c.C == c2.C);
    CHECK(c.L == c2.L);
    CHECK(c.corner_vertex == c2.corner_vertex);
}

TEST_CASE("white count identity and exact sampler speed path") {
    Rng rng(3);
    auto t = sample_uniform_ptree(3, 100000, rng, PTreeMethod::Exact);
    std::int64_t whites = 0, blacks = 0;
    for (std::int32_t v = 0; v < t.size(); ++v) ((t.depth[v] & 1) ? blacks : whites)++;
    CHECK(blacks == 100000);
    CHECK(whites == 2 * 100000 + 1);
}

TEST_CASE("unique shape for (p=2,n=1)") {
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        auto t = sample_uniform_ptree(2, 1, rng);
        CHECK(t.size() == 3);
    }
}

static std::map<std::vector<std::int32_t>, std::int64_t> shape_hist(std::int32_t p,
                                                                    std::int64_t n,
                                                                    PTreeMethod method,
                                                                    std::int64_t draws,
                                                                    std::uint64_t seed) {
    Rng rng(seed);
    std::map<std::vector<std::int32_t>, std::int64_t> hist;
    for (std::int64_t i = 0; i < draws; ++i)
        hist[sample_uniform_ptree(p, n, rng, method).preorder_degrees()]++;
    return hist;
}

TEST_CASE("sampler uniformity over shapes (both methods), label uniformity") {
    const std::int64_t draws = 20000;
    auto shapes = enumerate_ptree_shapes(2, 3);
    REQUIRE(shapes.size() == 5);
    for (auto method : {PTreeMethod::GaltonWatson, PTreeMethod::Exact}) {
        auto hist = shape_hist(2, 3, method, draws, 99);
        std::vector<std::int64_t> obs;
        for (const auto& s : shapes) obs.push_back(hist[s.preorder_degrees()]);
        std::vector<double> w(shapes.size(), 1.0);
        CHECK(chi_square_pvalue(obs, w) > 0.01);
    }
    // per-black increment uniformity, p = 2
    Rng rng(123);
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> inc;
    for (int i = 0; i < 20000; ++i) {
        auto th = sample_labeled_ptree(2, 2, rng);
        for (std::int32_t v = 0; v < th.tree.size(); ++v) {
            if (th.is_white(v)) continue;
            std::int32_t pa = th.label[th.tree.parent[v]];
            std::int32_t ch = th.label[th.tree.first_child[v]];
            inc[{ch - pa, pa - ch}]++;
        }
    }
    REQUIRE(inc.size() == 3);
    std::vector<std::int64_t> obs;
    for (auto& [k, v] : inc) obs.push_back(v);
    CHECK(chi_square_pvalue(obs, {1, 1, 1}) > 0.01);
    // root label is always 0
    for (int i = 0; i < 50; ++i) {
        auto th = sample_labeled_ptree(3, 5, rng);
        CHECK(th.label[0] == 0);
    }
}

TEST_CASE("branching subtrees: root corner and partition") {
    Rng rng(11);
    for (int rep = 0; rep < 60; ++rep) {
        auto th = sample_labeled_ptree(2 + static_cast<std::int32_t>(rng.uniform_below(2)),
                                       1 + static_cast<std::int64_t>(rng.uniform_below(8)), rng);
        auto c = contour_and_labels(th);
        // root corner, right side: one subtree per black child of the root,
        // all at level 0
        auto at_root = branching_subtrees(th, c, 0, true);
        CHECK(static_cast<std::int64_t>(at_root.size()) == th.tree.child_count(0));
        for (const auto& b : at_root) {
            CHECK(b.level == 0);
            CHECK(b.subtree.label[0] == 0);
            b.subtree.validate();
        }
        // partition: both sides + ancestral line = everything
        std::int64_t corner = static_cast<std::int64_t>(rng.uniform_below(
            static_cast<std::uint64_t>(c.length() + 1)));
        auto right = branching_subtrees(th, c, corner, true);
        auto left = branching_subtrees(th, c, corner, false);
        std::int64_t covered = 0;
        for (const auto& side : {right, left})
            for (const auto& b : side)
                covered += b.subtree.tree.size() - (b.root_is_copy ? 1 : 0);
        std::int64_t line = 0;
        for (std::int32_t u = c.corner_vertex[static_cast<std::size_t>(corner)]; u >= 0;
             u = th.tree.parent[u])
            ++line;
        CHECK(covered + line == th.tree.size());
    }
}

TEST_CASE("branching subtrees: cherry leaf corner") {
    // shape with two black children under the root (p=2, n=2), leaf corner of
    // the first branch: one right subtree at level 0
    auto all = enumerate_labeled_ptrees(2, 2);
    for (const auto& th : all) {
        if (th.tree.child_count(0) != 2) continue;
        auto c = contour_and_labels(th);
        auto right = branching_subtrees(th, c, 1, true);
        REQUIRE(right.size() == 1);
        CHECK(right[0].level == 0);
        CHECK(right[0].subtree.n_black == 1);
        break;
    }
}
