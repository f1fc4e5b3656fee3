#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "randmaps/errors.hpp"

namespace randmaps {

// Plain-text key=value configuration ('#' comments). Every threshold used by
// a runner is read here up front, never chosen after looking at the data.
struct ExperimentConfig {
    std::map<std::string, std::string> kv;

    static ExperimentConfig parse_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string get_str(const std::string& key, const std::string& def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    double get_num(const std::string& key, double def) const;
    std::vector<std::int64_t> get_int_list(const std::string& key,
                                           const std::vector<std::int64_t>& def) const;

    std::string experiment() const { return get_str("experiment", ""); }
    std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("seed", 1)); }
};

struct StatCell {
    std::string experiment;
    std::int64_t q = 0;
    std::int64_t n = 0;
    std::string stat;
    double value = 0;
    double stderr_ = 0;
};

struct PlotData {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct ExperimentRecord {
    std::vector<std::pair<std::string, std::string>> config_echo;  // sorted
    std::uint64_t seed = 0;
    std::string rng_note;
    std::vector<StatCell> cells;
    std::vector<std::string> failures;  // violated identities / tolerances
    std::vector<PlotData> plots;

    bool ok() const { return failures.empty(); }
    const StatCell* find(const std::string& stat, std::int64_t q, std::int64_t n) const;
};

ExperimentRecord run_universality(const ExperimentConfig& cfg);
ExperimentRecord run_two_point(const ExperimentConfig& cfg);
ExperimentRecord run_ball_volume(const ExperimentConfig& cfg);
ExperimentRecord run_geodesic_stats(const ExperimentConfig& cfg);
ExperimentRecord run_dmgb_sweep(const ExperimentConfig& cfg);

// dispatch on cfg.experiment()
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

// exact-identity subset of the configured experiment
ExperimentRecord run_verify(const ExperimentConfig& cfg);

// Writes report.csv, report.json and plots/*.dat under dir (created if
// needed); wall-clock goes to a separate timing.txt so the report files are
// byte-identical across reruns with the same (config, seed).
void emit_report(const ExperimentRecord& rec, const std::string& dir,
                 double wall_seconds = -1.0);

ExperimentRecord load_record_json(const std::string& path);
bool records_equal(const ExperimentRecord& a, const ExperimentRecord& b);

std::string default_stamp();  // UTC wall-clock stamp for the output directory

}  // namespace randmaps
