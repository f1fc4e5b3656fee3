// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Each criterion can be run alone by passing its number.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "randmaps/bdg.hpp"
#include "randmaps/dmgb.hpp"
#include "randmaps/experiments.hpp"
#include "randmaps/snake.hpp"
#include "randmaps/stats.hpp"
#include "randmaps/tri.hpp"
#include "randmaps/ttree.hpp"
#include "support/ttree_enum.hpp"

using namespace randmaps;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    const char* description;
    std::function<bool(std::string&)> run;
};

bool check(bool cond, std::string& detail, const std::string& msg) {
    if (!cond && detail.empty()) detail = msg;
    return cond;
}

// ---- 1: exact bijection suite ------------------------------------------

bool criterion1(std::string& detail) {
    bool ok = true;
    for (std::int32_t p : {2, 3}) {
        for (std::int64_t n = 1; n <= 4; ++n) {
            auto all = enumerate_labeled_ptrees(p, n, 1 << 21);
            std::set<std::vector<std::int32_t>> codes;
            for (const auto& th : all) {
                for (std::int32_t eps : {0, 1}) {
                    auto bm = bdg_forward(th, eps);
                    const auto& m = bm.map;
                    ok &= check(m.vertex_count() == (p - 1) * n + 2, detail, "V mismatch");
                    ok &= check(m.edge_count() == p * n, detail, "E mismatch");
                    ok &= check(m.face_count() == n, detail, "F mismatch");
                    ok &= check(m.euler_characteristic() == 2, detail, "Euler != 2");
                    for (const auto& f : m.faces())
                        ok &= check(f.degree == 2 * p, detail, "face degree != 2p");
                    ok &= check(verify_distance_formula(bm).ok, detail, "distance formula");
                    codes.insert(m.canonical_code());
                }
                // label bound on all corner pairs
                auto bm = bdg_forward(th, 1);
                const std::int64_t pn = bm.coding.length();
                for (std::int64_t i = 0; i <= pn; ++i) {
                    auto df = bfs_distances(bm.map, bm.corner_map_vertex(i));
                    for (std::int64_t j = 0; j <= pn; ++j)
                        ok &= check(df.d[bm.corner_map_vertex(j)] <=
                                        cactus_bound(bm.coding, i, j),
                                    detail, "cactus bound violated");
                }
            }
            ok &= check(codes.size() == 2 * all.size(), detail,
                        "maps not pairwise non-isomorphic at p=" + std::to_string(p) +
                            " n=" + std::to_string(n));
        }
    }
    return ok;
}

// ---- 2: exact DMGB suite -------------------------------------------------

bool dmgb_case(const LabeledPTree& th, Rng& rng, std::int64_t pair_samples,
               std::string& detail) {
    bool ok = true;
    auto bm = bdg_forward(th, 1);
    auto d = build_dmgb(th);
    auto rep = verify_dmgb_properties(d, bm, rng, pair_samples);
    ok &= check(rep.ok, detail, "dmgb properties violated");
    if (d.delta >= 2) {
        std::map<std::int64_t, std::int64_t> census, expected;
        for (const auto& f : d.map.faces()) census[f.degree]++;
        expected[2 * th.p] += th.n_black;
        expected[2 * d.delta] += 1;
        ok &= check(census == expected, detail, "dmgb face census");
        ok &= check(glue_dmgb(d).canonical_code() == bm.map.canonical_code(), detail,
                    "gluing does not recover the map");
    }
    return ok;
}

bool criterion2(std::string& detail) {
    bool ok = true;
    Rng rng(2026);
    for (std::int64_t n = 1; n <= 4; ++n)
        for (const auto& th : enumerate_labeled_ptrees(2, n)) ok &= dmgb_case(th, rng, -1, detail);
    for (int rep = 0; rep < 100; ++rep) {
        std::int32_t p = rep % 2 ? 3 : 2;
        auto th = sample_labeled_ptree(p, 10000, rng);
        ok &= dmgb_case(th, rng, 1000, detail);
    }
    return ok;
}

// ---- 3: exact triangulation suite ----------------------------------------

bool tri_case(const LabeledTTree& th, Rng& rng, int sources, std::string& detail) {
    bool ok = true;
    auto tm = ttree_to_triangulation(th);
    const auto& m = tm.map;
    ok &= check(m.vertex_count() == tm.n_vertices, detail, "tri V");
    ok &= check(m.face_count() == 2 * (tm.n_vertices - 2), detail, "tri F");
    ok &= check(m.euler_characteristic() == 2, detail, "tri Euler");
    for (const auto& f : m.faces()) ok &= check(f.degree == 3, detail, "tri face degree");
    auto df = bfs_distances(m, m.pointed);
    for (std::int64_t i = 0; i < tm.coding.length(); ++i) {
        if (!tm.corner_is_type1(i)) continue;
        ok &= check(df.d[tm.corner_map_vertex(i)] ==
                        tm.coding.L[static_cast<std::size_t>(i)] - tm.min_label + 1,
                    detail, "tri distance identity");
    }
    std::uint32_t eminus = m.vertex_of[m.root_half];
    std::uint32_t eplus = m.vertex_of[m.alpha[m.root_half]];
    if (tm.positive)
        ok &= check(df.d[eplus] == df.d[eminus] + 1, detail, "positive class");
    else
        ok &= check(df.d[eplus] == df.d[eminus], detail, "null class");
    for (int s = 0; s < sources; ++s) {
        std::int64_t i = static_cast<std::int64_t>(
            rng.uniform_below(static_cast<std::uint64_t>(tm.coding.length())));
        if (!tm.corner_is_type1(i)) continue;
        auto dfi = bfs_distances(m, tm.corner_map_vertex(i));
        for (std::int64_t j = 0; j < tm.coding.length(); ++j) {
            if (!tm.corner_is_type1(j)) continue;
            ok &= check(dfi.d[tm.corner_map_vertex(j)] <= cactus_bound(tm.coding, i, j),
                        detail, "tri cactus bound");
        }
    }
    return ok;
}

bool criterion3(std::string& detail) {
    bool ok = true;
    Rng rng(33);
    using testsupport::enumerate_labeled_ttrees;
    for (std::int32_t rt : {1, 2}) {
        auto all = enumerate_labeled_ttrees(3, rt);
        ok &= check(!all.empty(), detail, "empty enumeration");
        std::set<std::vector<std::int32_t>> codes;
        for (const auto& th : all) {
            ok &= tri_case(th, rng, 4, detail);
            codes.insert(ttree_to_triangulation(th).map.canonical_code());
        }
        ok &= check(codes.size() == all.size(), detail, "tri bijection not injective");
    }
    for (std::int64_t n : {100, 1000, 10000}) {
        for (std::int32_t rt : {1, 2}) {
            auto s = sample_conditioned_ttree(n, rt, rng);
            auto th = sample_admissible_tlabels(s.tree, rng);
            ok &= tri_case(th, rng, 2, detail);
        }
    }
    return ok;
}

// ---- 4: constants ---------------------------------------------------------

bool criterion4(std::string& detail) {
    bool ok = true;
    auto c = verify_tri_constants();
    const double s3 = std::sqrt(3.0);
    auto near = [&](double x, double y, const char* what) {
        return check(std::abs(x - y) < 1e-12, detail, what);
    };
    ok &= near(c.spectral_radius, 1.0, "spectral radius");
    ok &= near(c.lambda32, (3.0 - s3) / 4.0, "lambda_{3/2}");
    ok &= near(c.kappa32, std::pow(3.0, 0.25), "kappa_{3/2}");
    ok &= near(c.sigma_sq, (s3 - 1.0) / 8.0, "Sigma^2");
    ok &= near(c.a_q_b, (6.0 - 3.0 * s3) * (6.0 - s3) / 8.0, "a.Q(b)");
    ok &= near(c.a[0] + c.a[1] + c.a[2] + c.a[3], 1.0, "sum a");
    double ab = 0;
    for (int i = 0; i < 4; ++i) ab += c.a[i] * c.b[i];
    ok &= near(ab, 1.0, "a.b");
    for (std::int32_t p : {2, 3, 4, 5, 9}) ok &= near(kappa_p(p), c_q(2 * p), "kappa_p = c_2p");
    ok &= near(std::pow(2.0 * 3.0, 0.25), c_q(3), "(2*3)^(1/4) = c_3");
    ok &= near(c.kappa32 * std::pow(2.0, 0.25), c_q(3), "kappa_{3/2} in face units");
    return ok;
}

// ---- 5: sampler uniformity ------------------------------------------------

bool criterion5(std::string& detail) {
    bool ok = true;
    const std::int64_t draws = 100000;
    {
        auto shapes = enumerate_ptree_shapes(2, 4);
        std::map<std::vector<std::int32_t>, std::size_t> index;
        for (std::size_t i = 0; i < shapes.size(); ++i)
            index[shapes[i].preorder_degrees()] = i;
        for (auto method : {PTreeMethod::GaltonWatson, PTreeMethod::Exact}) {
            Rng rng(method == PTreeMethod::Exact ? 501 : 502);
            std::vector<std::int64_t> obs(shapes.size(), 0);
            for (std::int64_t i = 0; i < draws; ++i)
                obs[index.at(sample_uniform_ptree(2, 4, rng, method).preorder_degrees())]++;
            double pv = chi_square_pvalue(obs, std::vector<double>(shapes.size(), 1.0));
            ok &= check(pv > 0.01, detail,
                        "p-tree shape chi-square p=" + std::to_string(pv));
        }
    }
    {
        // conditioned Galton-Watson T-trees against the enumeration, whose
        // shape marginal weights each shape by its number of labelings
        auto shapes = testsupport::enumerate_ttree_shapes(5, 1);
        std::map<std::vector<std::int32_t>, std::size_t> index;
        std::vector<double> w;
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            index[shapes[i].tree.preorder_degrees()] = i;
            w.push_back(std::pow(2.0, static_cast<double>(shapes[i].free_label_sites())));
        }
        Rng rng(503);
        std::vector<std::int64_t> obs(shapes.size(), 0);
        for (std::int64_t i = 0; i < draws; ++i) {
            auto s = sample_conditioned_ttree(5, 1, rng);
            auto it = index.find(s.tree.tree.preorder_degrees());
            if (it == index.end()) {
                ok = check(false, detail, "sampled shape missing from enumeration");
                continue;
            }
            obs[it->second]++;
        }
        double pv = chi_square_pvalue(obs, w);
        ok &= check(pv > 0.01, detail, "t-tree shape chi-square p=" + std::to_string(pv));
    }
    return ok;
}

// ---- 6: continuum identities ----------------------------------------------

bool criterion6(std::string& detail) {
    bool ok = true;
    Rng rng(606);
    // brute-force chain oracle at tiny m
    for (std::int64_t m : {4, 5, 6}) {
        for (int rep = 0; rep < 4; ++rep) {
            auto g = sample_snake(m, rng);
            auto ms = dstar_grid(g);
            for (std::int64_t u = 0; u <= m; ++u)
                for (std::int64_t v = 0; v <= m; ++v) {
                    // oracle: enumerate all chains over distinct grid points
                    std::vector<std::int64_t> nodes;
                    for (std::int64_t t = 0; t <= m; ++t)
                        if (t != u && t != v) nodes.push_back(t);
                    double best = dcirc(g, u, v);
                    std::vector<std::uint8_t> used(static_cast<std::size_t>(m + 1), 0);
                    std::function<void(std::int64_t, double)> rec = [&](std::int64_t last,
                                                                        double acc) {
                        if (acc >= best) return;
                        best = std::min(best, acc + dcirc(g, last, v));
                        for (std::int64_t t : nodes) {
                            if (used[static_cast<std::size_t>(t)]) continue;
                            used[static_cast<std::size_t>(t)] = 1;
                            rec(t, acc + dcirc(g, last, t));
                            used[static_cast<std::size_t>(t)] = 0;
                        }
                    };
                    rec(u, 0.0);
                    ok &= check(std::abs(ms.ds(u, v) - best) < 1e-12, detail,
                                "metric closure differs from the chain oracle");
                }
        }
    }
    // invariants at m = 512
    for (int rep = 0; rep < 3; ++rep) {
        auto g = sample_snake(512, rng);
        auto ms = dstar_grid(g);
        const std::int64_t n = g.m + 1;
        for (std::int64_t i = 0; i < n; ++i) {
            ok &= check(ms.ds(i, i) == 0.0, detail, "nonzero diagonal");
            ok &= check(std::abs(ms.ds(i, g.s_star) -
                                 (g.Z[static_cast<std::size_t>(i)] + g.delta)) < 1e-9,
                        detail, "D*(.,s*) != Z + delta");
            for (std::int64_t j = 0; j < n; ++j) {
                ok &= check(ms.ds(i, j) <= ms.dc(i, j), detail, "D* > Dcirc");
                ok &= check(ms.dc(i, j) >= std::abs(g.Z[static_cast<std::size_t>(i)] -
                                                    g.Z[static_cast<std::size_t>(j)]) -
                                               1e-12,
                            detail, "Dcirc < |dZ|");
            }
        }
        // full exact triangle check on one sample, spot checks on the rest
        if (rep == 0) {
            for (std::int64_t k = 0; k < n && ok; ++k)
                for (std::int64_t i = 0; i < n && ok; ++i)
                    for (std::int64_t j = 0; j < n; ++j)
                        if (ms.ds(i, j) > ms.ds(i, k) + ms.ds(k, j)) {
                            ok = check(false, detail, "triangle inequality violated");
                            break;
                        }
        } else {
            for (int t = 0; t < 200000; ++t) {
                auto a = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n)));
                auto b = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n)));
                auto c = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n)));
                ok &= check(ms.ds(a, c) <= ms.ds(a, b) + ms.ds(b, c), detail,
                            "triangle inequality violated");
            }
        }
    }
    return ok;
}

// ---- 7-9: statistical experiments ------------------------------------------

bool criterion7(std::string& detail) {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = universality\nqs = 4,6\nns = 1000,10000,30000\n"
        "ladder_samples = 10000\nsamples = 2000\nm = 2048\ncontinuum_samples = 10000\n"
        "delta_refine_factor = 128\n"
        "seed = 20260810\ntol_ks_qq = 0.05\ntol_ks_continuum = 0.08\n");
    auto rec = run_universality(cfg);
    if (!rec.ok()) {
        detail = rec.failures.front();
        return false;
    }
    return true;
}

bool criterion8(std::string& detail) {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = two_point\nm = 2048\ncontinuum_samples = 10000\nq = 4\nn = 30000\n"
        "delta_refine_factor = 128\n"
        "samples = 2000\nladder_samples = 10000\nseed = 88\n"
        "tol_ks_continuum = 0.05\ntol_ks_discrete = 0.05\n");
    auto rec = run_two_point(cfg);
    if (!rec.ok()) {
        detail = rec.failures.front();
        return false;
    }
    return true;
}

bool criterion9(std::string& detail) {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = ball_volume\nq = 4\nvolume_n = 100000\nvolume_samples = 200\n"
        "seed = 99\ntol_slope_lo = 3.5\ntol_slope_hi = 4.5\n");
    auto rec = run_ball_volume(cfg);
    if (!rec.ok()) {
        detail = rec.failures.front();
        return false;
    }
    const auto* slope = rec.find("volume_slope", 4, 100000);
    if (!slope) {
        detail = "missing slope cell";
        return false;
    }
    detail = "slope = " + std::to_string(slope->value);
    return slope->value >= 3.5 && slope->value <= 4.5;
}

// ---- 10: determinism --------------------------------------------------------

bool criterion10(std::string& detail) {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = dmgb_sweep\nns = 200\nsweep_samples = 8\nseed = 1234\nstamp = run\n");
    fs::path base = fs::temp_directory_path() / "rm_accept_det";
    fs::remove_all(base);
    auto r1 = run_experiment(cfg);
    auto r2 = run_experiment(cfg);
    emit_report(r1, (base / "a").string());
    emit_report(r2, (base / "b").string());
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    bool ok = records_equal(r1, r2);
    ok = ok && slurp(base / "a/report.csv") == slurp(base / "b/report.csv");
    ok = ok && slurp(base / "a/report.json") == slurp(base / "b/report.json");
    for (const auto& entry : fs::directory_iterator(base / "a/plots"))
        ok = ok && slurp(entry.path()) == slurp(base / "b/plots" / entry.path().filename());
    // a second experiment type through the same path
    ExperimentConfig cfg2 = ExperimentConfig::parse_text(
        "experiment = geodesic_stats\nns = 300\ngeo_samples = 100\nseed = 77\n");
    ok = ok && records_equal(run_experiment(cfg2), run_experiment(cfg2));
    if (!ok) detail = "reports differ between reruns";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> cs{
        {1, "exact bijection suite (p in {2,3}, n <= 4, both orientations)", criterion1},
        {2, "exact map-with-boundary suite (properties, census, gluing, chain)", criterion2},
        {3, "exact triangulation suite (counts, identities, classes, injectivity)", criterion3},
        {4, "scaling constants to 1e-12", criterion4},
        {5, "sampler uniformity chi-square vs enumeration oracles", criterion5},
        {6, "grid metric identities and chain oracle", criterion6},
        {7, "universality collapse at n = 3e4 (KS tolerances, ladder trend)", criterion7},
        {8, "two-point law vs one-point law (continuum and discrete)", criterion8},
        {9, "ball volume growth exponent in [3.5, 4.5]", criterion9},
        {10, "byte-identical reports under fixed (config, seed)", criterion10},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    int failures = 0;
    for (auto& c : cs) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", c.id, c.description,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
