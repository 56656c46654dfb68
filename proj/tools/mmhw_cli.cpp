// Command-line front end: simulate, validate, version.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmhw/mmhw.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mmhw::IoError("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_violations(const mmhw::InvalidConfig& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of a highway mmWave D2D vehicular network"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string trajectory_path;
    std::uint64_t seed = 0;
    std::uint64_t snapshots = 0;
    int workers = 0;

    auto* simulate = app.add_subcommand("simulate", "run the configured sweep and write CSV outputs");
    simulate->add_option("--config", config_path, "scenario config (JSON)")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_option("--seed", seed, "override run.master_seed");
    simulate->add_option("--snapshots", snapshots, "override run.num_snapshots");
    simulate->add_option("--workers", workers, "worker threads (does not change results)");
    simulate->add_option("--trajectory", trajectory_path,
                         "debug: dump the first mobility trace of sweep point 0 as CSV");

    auto* validate = app.add_subcommand("validate", "check a config and print it with defaults filled in");
    validate->add_option("--config", config_path, "scenario config (JSON)")->required();

    app.add_subcommand("version", "print the version string");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("version")) {
            std::cout << mmhw::kVersion << '\n';
            return 0;
        }
        auto cfg = mmhw::validate_config(read_file(config_path));
        if (app.got_subcommand("validate")) {
            std::cout << mmhw::to_json(cfg).dump(2) << '\n';
            return 0;
        }

        if (simulate->count("--seed")) cfg.master_seed = seed;
        if (simulate->count("--snapshots")) cfg.num_snapshots = snapshots;
        if (simulate->count("--workers")) cfg.workers = workers;
        if (auto v = mmhw::scenario_violations(cfg); !v.empty()) throw mmhw::InvalidConfig(std::move(v));

        mmhw::ensure_writable_dir(out_dir);
        std::unique_ptr<std::ofstream> trajectory;
        if (!trajectory_path.empty()) {
            trajectory = std::make_unique<std::ofstream>(trajectory_path);
            if (!*trajectory) throw mmhw::IoError("cannot write " + trajectory_path);
            *trajectory << "time,vehicle_id,lane,position,speed\n";
        }

        const auto sweep = mmhw::run_sweep(cfg, cfg.workers, trajectory.get());
        mmhw::write_outputs(out_dir, cfg, sweep);
        for (const auto& p : sweep.points) {
            const auto& c = p.counters;
            std::cout << "point " << p.point.index << ": psi=" << p.point.psi_deg
                      << " lambda=" << p.receiver_lane_lambda(cfg.receiver_lane) << " evaluated=" << c.evaluated
                      << " empty=" << c.skipped_empty << " truncated=" << c.truncations << " (" << p.seconds
                      << " s)\n";
        }
        std::cout << "wrote " << out_dir << " in " << sweep.seconds << " s\n";
        return 0;
    } catch (const mmhw::InvalidConfig& e) {
        print_violations(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
