#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "randmaps/bdg.hpp"
#include "randmaps/dmgb.hpp"
#include "randmaps/experiments.hpp"
#include "randmaps/labeled_ptree.hpp"
#include "randmaps/snake.hpp"
#include "randmaps/tri.hpp"
#include "randmaps/ttree.hpp"

using namespace randmaps;

namespace {

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open output: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

int cmd_sample_tree(std::int64_t p, std::int64_t n, std::uint64_t seed,
                    const std::string& out) {
    Rng rng(seed);
    auto th = sample_labeled_ptree(static_cast<std::int32_t>(p), n, rng);
    auto coding = contour_and_labels(th);
    write_file(out, serialize_coding(coding));
    std::printf("labeled %lld-tree with %lld black vertices -> %s (%lld corners)\n",
                static_cast<long long>(p), static_cast<long long>(n), out.c_str(),
                static_cast<long long>(coding.length()));
    return 0;
}

int cmd_sample_map(std::int64_t q, std::int64_t n, std::uint64_t seed, const std::string& out,
                   bool binary) {
    if (q < 4 || q % 2 != 0) throw Error("sample-map: q must be an even integer >= 4");
    Rng rng(seed);
    auto th = sample_labeled_ptree(static_cast<std::int32_t>(q / 2), n, rng);
    auto bm = bdg_forward(th, rng.bernoulli(0.5) ? 1 : 0);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot open output: " + out);
    if (binary)
        write_map_binary(f, bm.map);
    else
        write_map_text(f, bm.map, bm.p, bm.n);
    std::printf("%lld-angulation with %lld faces -> %s (V=%lld E=%lld)\n",
                static_cast<long long>(q), static_cast<long long>(n), out.c_str(),
                static_cast<long long>(bm.map.vertex_count()),
                static_cast<long long>(bm.map.edge_count()));
    return 0;
}

int cmd_verify_map(const std::string& in) {
    std::ifstream f(in, std::ios::binary);
    if (!f) throw Error("cannot open input: " + in);
    auto map = read_map_binary(f);
    map.validate();
    std::map<std::int64_t, std::int64_t> census;
    for (const auto& face : map.faces()) census[face.degree]++;
    std::printf("V=%lld E=%lld F=%lld euler=%lld\n",
                static_cast<long long>(map.vertex_count()),
                static_cast<long long>(map.edge_count()),
                static_cast<long long>(map.face_count()),
                static_cast<long long>(map.euler_characteristic()));
    for (const auto& [deg, cnt] : census)
        std::printf("faces of degree %lld: %lld\n", static_cast<long long>(deg),
                    static_cast<long long>(cnt));
    if (map.euler_characteristic() != 2) {
        std::fprintf(stderr, "verify-map: not genus 0\n");
        return 1;
    }
    std::printf("ok\n");
    return 0;
}

int cmd_build_dmgb(std::int64_t p, std::int64_t n, std::uint64_t seed, const std::string& out) {
    Rng rng(seed);
    auto th = sample_labeled_ptree(static_cast<std::int32_t>(p), n, rng);
    auto d = build_dmgb(th);
    {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw Error("cannot open output: " + out);
        write_map_text(f, d.map, d.p, d.n);
    }
    {
        std::ofstream f(out + ".boundary", std::ios::binary);
        for (std::size_t i = 0; i < d.gamma.size(); ++i)
            f << "gamma " << i << ' ' << d.gamma[i] << '\n';
        for (std::size_t i = 0; i < d.gamma_tilde.size(); ++i)
            f << "gammatilde " << i << ' ' << d.gamma_tilde[i] << '\n';
    }
    std::printf("dmgb with delta=%lld -> %s (+.boundary)\n", static_cast<long long>(d.delta),
                out.c_str());
    return 0;
}

int cmd_sample_tri(std::int64_t n, const std::string& cls, std::uint64_t seed,
                   const std::string& out) {
    Rng rng(seed);
    std::int32_t root_type = cls == "pos" ? 1 : 2;
    auto shape = sample_conditioned_ttree(n, root_type, rng);
    auto th = sample_admissible_tlabels(shape.tree, rng);
    auto tm = ttree_to_triangulation(th);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot open output: " + out);
    write_map_text(f, tm.map, 3, tm.map.face_count());
    std::printf("%s triangulation with %lld vertices, %lld faces -> %s\n",
                tm.positive ? "positive" : "null", static_cast<long long>(tm.n_vertices),
                static_cast<long long>(tm.map.face_count()), out.c_str());
    return 0;
}

int cmd_tri_constants() {
    auto c = verify_tri_constants();
    nlohmann::ordered_json j;
    j["mean_matrix"] = nlohmann::ordered_json::array();
    for (int i = 0; i < 4; ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int k = 0; k < 4; ++k) row.push_back(c.mean[i][k]);
        j["mean_matrix"].push_back(row);
    }
    j["spectral_radius"] = c.spectral_radius;
    j["a"] = {c.a[0], c.a[1], c.a[2], c.a[3]};
    j["b"] = {c.b[0], c.b[1], c.b[2], c.b[3]};
    j["a_Q_b"] = c.a_q_b;
    j["lambda_3_2"] = c.lambda32;
    j["sigma_sq"] = c.sigma_sq;
    j["kappa_3_2"] = c.kappa32;
    j["c_3"] = c_q(3);
    j["c_4"] = c_q(4);
    j["c_6"] = c_q(6);
    j["kappa_2"] = kappa_p(2);
    j["kappa_3"] = kappa_p(3);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_sample_snake(std::int64_t m, std::uint64_t seed, const std::string& out) {
    Rng rng(seed);
    auto g = sample_snake(m, rng);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot open output: " + out);
    write_snake_csv(f, g);
    std::printf("snake grid m=%lld delta=%g s*=%lld -> %s\n", static_cast<long long>(m),
                g.delta, static_cast<long long>(g.s_star), out.c_str());
    return 0;
}

int cmd_experiment(const std::string& mode, const std::string& config_path,
                   const std::string& out_override) {
    auto cfg = ExperimentConfig::load(config_path);
    if (!out_override.empty()) cfg.kv["out"] = out_override;
    auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord rec = mode == "verify" ? run_verify(cfg) : run_experiment(cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string out = cfg.get_str("out", "out");
    std::string stamp = cfg.get_str("stamp", default_stamp());
    std::string dir = out + "/" + cfg.experiment() + (mode == "verify" ? "-verify" : "") + "/" +
                      stamp;
    emit_report(rec, dir, wall);
    std::printf("%s %s: %zu cells, %zu failures -> %s\n", cfg.experiment().c_str(),
                mode.c_str(), rec.cells.size(), rec.failures.size(), dir.c_str());
    for (const auto& msg : rec.failures) std::fprintf(stderr, "FAIL: %s\n", msg.c_str());
    return rec.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniform random planar maps, their geodesic-boundary variants, and the "
                 "discretized continuum limit"};
    app.require_subcommand(1);

    std::int64_t p = 2, n = 10, q = 4, m = 512;
    std::uint64_t seed = 1;
    std::string out, in, cls = "pos", config, mode;
    bool binary = false;

    auto* st = app.add_subcommand("sample-tree", "sample a uniform labeled p-tree");
    st->add_option("--p", p, "arity (>= 2)")->required();
    st->add_option("--n", n, "black vertex count")->required();
    st->add_option("--seed", seed, "rng seed");
    st->add_option("--out", out, "output RMLT file")->required();

    auto* sm = app.add_subcommand("sample-map", "sample a uniform rooted pointed 2p-angulation");
    sm->add_option("--q", q, "face degree (even, >= 4)")->required();
    sm->add_option("--n", n, "face count")->required();
    sm->add_option("--seed", seed, "rng seed");
    sm->add_option("--out", out, "output file")->required();
    sm->add_flag("--binary", binary, "write the compact binary format");

    auto* vm = app.add_subcommand("verify-map", "check map invariants");
    vm->add_option("--in", in, "input RMPM file")->required();

    auto* bd = app.add_subcommand("build-dmgb", "build a map with geodesic boundaries");
    bd->add_option("--p", p, "arity (>= 2)")->required();
    bd->add_option("--n", n, "black vertex count")->required();
    bd->add_option("--seed", seed, "rng seed");
    bd->add_option("--out", out, "output file")->required();

    auto* tr = app.add_subcommand("sample-tri", "sample a uniform rooted pointed triangulation");
    tr->add_option("--n", n, "vertex count (>= 3)")->required();
    tr->add_option("--class", cls, "pos | null")->check(CLI::IsMember({"pos", "null"}));
    tr->add_option("--seed", seed, "rng seed");
    tr->add_option("--out", out, "output file")->required();

    app.add_subcommand("tri-constants", "print the scaling-constant table as JSON");

    auto* sn = app.add_subcommand("sample-snake", "sample a discretized snake (e, Z)");
    sn->add_option("--m", m, "grid size")->required();
    sn->add_option("--seed", seed, "rng seed");
    sn->add_option("--out", out, "output CSV")->required();

    auto* ex = app.add_subcommand("experiment", "run a Monte Carlo experiment");
    ex->require_subcommand(1);
    auto* exr = ex->add_subcommand("run", "run the configured experiment");
    exr->add_option("--config", config, "key=value config file")->required();
    exr->add_option("--out", out, "override the output directory");
    auto* exv = ex->add_subcommand("verify", "run only the exact-identity suites");
    exv->add_option("--config", config, "key=value config file")->required();
    exv->add_option("--out", out, "override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (st->parsed()) return cmd_sample_tree(p, n, seed, out);
        if (sm->parsed()) return cmd_sample_map(q, n, seed, out, binary);
        if (vm->parsed()) return cmd_verify_map(in);
        if (bd->parsed()) return cmd_build_dmgb(p, n, seed, out);
        if (tr->parsed()) return cmd_sample_tri(n, cls, seed, out);
        if (app.get_subcommand("tri-constants")->parsed()) return cmd_tri_constants();
        if (sn->parsed()) return cmd_sample_snake(m, seed, out);
        if (ex->parsed())
            return cmd_experiment(exr->parsed() ? "run" : "verify", config, out);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }
    return 0;
}
