#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "randmaps/experiments.hpp"
#include "randmaps/stats.hpp"

using namespace randmaps;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("config parsing") {
    auto cfg = ExperimentConfig::parse_text(
        "# comment\nexperiment = universality\nqs = 4,6\nseed= 9\n tol_ks_qq =0.5\n");
    CHECK(cfg.experiment() == "universality");
    CHECK(cfg.get_int_list("qs", {}) == std::vector<std::int64_t>{4, 6});
    CHECK(cfg.seed() == 9);
    CHECK(cfg.get_num("tol_ks_qq", 0) == 0.5);
    CHECK(cfg.get_int("missing", 7) == 7);
}

TEST_CASE("small universality run: cells, report, determinism, round trip") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = universality\nqs = 4,6\nns = 40,80\nladder_samples = 400\n"
        "samples = 300\nm = 64\ncontinuum_samples = 400\nseed = 12\n"
        "tol_ks_qq = 0.9\ntol_ks_continuum = 0.9\n");
    auto rec1 = run_universality(cfg);
    auto rec2 = run_universality(cfg);
    CHECK(records_equal(rec1, rec2));
    CHECK(rec1.find("one_point_mean", 4, 40) != nullptr);
    CHECK(rec1.find("ks_q4_q6", 0, 80) != nullptr);
    CHECK(rec1.find("ks_pinned", 0, 80) != nullptr);
    CHECK(rec1.find("ks_continuum", 4, 80) != nullptr);

    fs::path dir1 = fs::temp_directory_path() / "rm_exp_a";
    fs::path dir2 = fs::temp_directory_path() / "rm_exp_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    emit_report(rec1, dir1.string());
    emit_report(rec2, dir2.string());
    CHECK(slurp((dir1 / "report.csv").string()) == slurp((dir2 / "report.csv").string()));
    CHECK(slurp((dir1 / "report.json").string()) == slurp((dir2 / "report.json").string()));
    // plot files byte-identical too
    for (const auto& entry : fs::directory_iterator(dir1 / "plots")) {
        auto other = dir2 / "plots" / entry.path().filename();
        CHECK(slurp(entry.path().string()) == slurp(other.string()));
    }
    // CSV header contract
    auto csv = slurp((dir1 / "report.csv").string());
    CHECK(csv.rfind("experiment,q,n,stat,value,stderr,seed\n", 0) == 0);

    auto loaded = load_record_json((dir1 / "report.json").string());
    CHECK(loaded.seed == rec1.seed);
    REQUIRE(loaded.cells.size() == rec1.cells.size());
    for (std::size_t i = 0; i < loaded.cells.size(); ++i) {
        CHECK(loaded.cells[i].stat == rec1.cells[i].stat);
        CHECK(loaded.cells[i].value == rec1.cells[i].value);  // exact double round trip
        CHECK(loaded.cells[i].stderr_ == rec1.cells[i].stderr_);
    }
}

TEST_CASE("empty record emits a header-only csv") {
    ExperimentRecord rec;
    fs::path dir = fs::temp_directory_path() / "rm_exp_empty";
    fs::remove_all(dir);
    emit_report(rec, dir.string());
    CHECK(slurp((dir / "report.csv").string()) == "experiment,q,n,stat,value,stderr,seed\n");
}

TEST_CASE("two-point small run") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = two_point\nm = 64\ncontinuum_samples = 300\nq = 4\nn = 200\n"
        "samples = 200\nladder_samples = 600\nseed = 5\n"
        "tol_ks_continuum = 0.9\ntol_ks_discrete = 0.9\n");
    auto rec = run_two_point(cfg);
    CHECK(rec.ok());
    CHECK(rec.find("ks_dstar_delta", 0, 64) != nullptr);
    CHECK(rec.find("ks_two_one", 4, 200) != nullptr);
    auto rec2 = run_two_point(cfg);
    CHECK(records_equal(rec, rec2));
}

TEST_CASE("ball volume small run keeps exact identities") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = ball_volume\nvolume_n = 2000\nvolume_samples = 30\nseed = 3\n"
        "tol_slope_lo = 0.5\ntol_slope_hi = 8\n");
    auto rec = run_ball_volume(cfg);
    CHECK(rec.ok());
    CHECK(rec.find("volume_slope", 4, 2000) != nullptr);
}

TEST_CASE("geodesic stats small run") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = geodesic_stats\nns = 500\ngeo_samples = 500\nseed = 2\n");
    auto rec = run_geodesic_stats(cfg);
    CHECK(rec.find("traversal_event_freq", 4, 500) != nullptr);
    CHECK(rec.find("coalescence_fraction_mean", 4, 500) != nullptr);
    CHECK(rec.find("bfs_equals_simple_fraction", 4, 500) != nullptr);
    auto rec2 = run_geodesic_stats(cfg);
    CHECK(records_equal(rec, rec2));
}

TEST_CASE("dmgb sweep small run has zero violations") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = dmgb_sweep\nns = 60,200\nsweep_samples = 10\nseed = 8\n");
    auto rec = run_dmgb_sweep(cfg);
    CHECK(rec.ok());
    CHECK(rec.find("chain_violations", 4, 60)->value == 0.0);
    CHECK(rec.find("chain_violations", 4, 200)->value == 0.0);
}

TEST_CASE("verify suites pass for every experiment") {
    for (const std::string e :
         {"universality", "two_point", "ball_volume", "geodesic_stats", "dmgb_sweep"}) {
        ExperimentConfig cfg = ExperimentConfig::parse_text("experiment = " + e + "\nseed = 4\n");
        auto rec = run_verify(cfg);
        INFO(e);
        CHECK(rec.ok());
    }
}
