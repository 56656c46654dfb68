#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmhw/simulation.hpp"

using namespace mmhw;

namespace {

ScenarioConfig small(MobilityMode mode) {
    auto cfg = default_scenario();
    cfg.road.road_length = 2000.0;
    cfg.mobility.mode = mode;
    cfg.mobility.krauss.warmup_duration = 30.0;
    cfg.num_snapshots = 60;
    cfg.sweep.psi_deg = {45.0, 90.0};
    return cfg;
}

std::string curves(const ScenarioConfig& cfg, const SweepResult& r) {
    std::ostringstream out;
    write_curve_csv(out, cfg, r, true);
    write_curve_csv(out, cfg, r, false);
    return out.str();
}

}  // namespace

TEST(Sweep, ExpansionOrderAndSeeds) {
    auto cfg = default_scenario();
    cfg.sweep.lambdas = {0.01, 0.02};
    cfg.sweep.psi_deg = {45.0, 90.0};
    const auto pts = expand_sweep(cfg);
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(pts[1].psi_deg, 90.0);
    EXPECT_EQ(pts[1].lane_intensities[0], 0.01);
    EXPECT_EQ(pts[2].lane_intensities[3], 0.02);
    EXPECT_NE(pts[0].seed, pts[1].seed);
    EXPECT_EQ(pts[3].seed, derive_seed(cfg.master_seed, 3));
}

TEST(Simulation, SameSeedSameBytes) {
    for (auto mode : {MobilityMode::Off, MobilityMode::Trace, MobilityMode::Redraw}) {
        const auto cfg = small(mode);
        EXPECT_EQ(curves(cfg, run_sweep(cfg, 1)), curves(cfg, run_sweep(cfg, 1))) << to_string(mode);
    }
}

TEST(Simulation, WorkerCountDoesNotChangeResults) {
    for (auto mode : {MobilityMode::Off, MobilityMode::Trace}) {
        const auto cfg = small(mode);
        EXPECT_EQ(curves(cfg, run_sweep(cfg, 1)), curves(cfg, run_sweep(cfg, 3))) << to_string(mode);
    }
}

TEST(Simulation, DifferentSeedDifferentResults) {
    auto cfg = small(MobilityMode::Off);
    const auto a = curves(cfg, run_sweep(cfg, 1));
    cfg.master_seed = 99;
    EXPECT_NE(a, curves(cfg, run_sweep(cfg, 1)));
}

TEST(Simulation, CountersAddUp) {
    auto cfg = small(MobilityMode::Off);
    const auto r = run_sweep(cfg, 2);
    for (const auto& p : r.points) {
        EXPECT_EQ(p.counters.snapshots, cfg.num_snapshots);
        EXPECT_EQ(p.counters.evaluated + p.counters.skipped_empty, p.counters.snapshots);
        EXPECT_EQ(p.metrics.count(), p.counters.evaluated);
        EXPECT_LE(p.counters.max_member_distance, 100.0 + 1e-9);
    }
    cfg.metrics.empty_cluster_as_outage = true;
    for (const auto& p : run_sweep(cfg, 2).points) EXPECT_EQ(p.metrics.count(), cfg.num_snapshots);
}

TEST(Output, CurveCsvLayout) {
    auto cfg = small(MobilityMode::Off);
    cfg.sweep.psi_deg = {45.0};
    const auto r = run_sweep(cfg, 1);
    std::ostringstream out;
    write_curve_csv(out, cfg, r, true);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kCurveHeader);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
        EXPECT_NE(line.find(",kappa,"), std::string::npos);
    }
    EXPECT_EQ(rows, 2 * cfg.metrics.kappa_gbps.size());
}

TEST(Output, WritesAllArtifacts) {
    const auto cfg = small(MobilityMode::Off);
    const auto dir = std::filesystem::temp_directory_path() / "mmhw_sim_test";
    std::filesystem::remove_all(dir);
    write_outputs(dir, cfg, run_sweep(cfg, 1));
    for (const char* f : {"rc_curve.csv", "pt_curve.csv", "summary.csv", "manifest.json"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    std::ifstream in(dir / "manifest.json");
    const auto manifest = json::parse(in);
    EXPECT_EQ(manifest.at("config_hash").get<std::string>().size(), 16u);
    std::filesystem::remove_all(dir);
}

TEST(Output, UnwritableDirectoryFailsEarly) {
    EXPECT_THROW(ensure_writable_dir("/proc/definitely/not/here"), IoError);
}
