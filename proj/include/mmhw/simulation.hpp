#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mmhw/antenna.hpp"
#include "mmhw/blockage.hpp"
#include "mmhw/channel.hpp"
#include "mmhw/mac.hpp"
#include "mmhw/metrics.hpp"
#include "mmhw/mobility.hpp"
#include "mmhw/random.hpp"
#include "mmhw/road.hpp"
#include "mmhw/scenario.hpp"

namespace mmhw {

inline constexpr const char* kVersion = "mmhw 1.0.0";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepPoint {
    std::size_t index = 0;
    std::vector<double> lane_intensities;
    std::vector<double> truck_fractions;
    double psi_deg = 45.0;
    std::uint64_t seed = 0;
};

/// Cartesian product truck_fractions x lambda x psi, psi varying fastest.
inline std::vector<SweepPoint> expand_sweep(const ScenarioConfig& cfg) {
    std::vector<std::vector<double>> eps_list = cfg.sweep.truck_fractions;
    if (eps_list.empty()) eps_list.push_back(cfg.road.truck_fractions);
    std::vector<std::vector<double>> lambda_list;
    for (double l : cfg.sweep.lambdas) lambda_list.emplace_back(static_cast<std::size_t>(cfg.road.num_lanes), l);
    if (lambda_list.empty()) lambda_list.push_back(cfg.road.lane_intensities);
    std::vector<double> psi_list = cfg.sweep.psi_deg;
    if (psi_list.empty()) psi_list.push_back(cfg.antenna.beamwidth_deg);

    std::vector<SweepPoint> points;
    for (const auto& eps : eps_list)
        for (const auto& lambdas : lambda_list)
            for (double psi : psi_list) {
                SweepPoint p;
                p.index = points.size();
                p.lane_intensities = lambdas;
                p.truck_fractions = eps;
                p.psi_deg = psi;
                p.seed = derive_seed(cfg.master_seed, p.index);
                points.push_back(std::move(p));
            }
    return points;
}

struct RunCounters {
    std::uint64_t snapshots = 0;
    std::uint64_t evaluated = 0;
    std::uint64_t skipped_empty = 0;
    std::uint64_t truncations = 0;
    std::uint64_t receiver_resamples = 0;
    std::uint64_t members_total = 0;
    std::uint64_t max_cluster = 0;
    double max_member_distance = 0.0;

    void merge(const RunCounters& o) {
        snapshots += o.snapshots;
        evaluated += o.evaluated;
        skipped_empty += o.skipped_empty;
        truncations += o.truncations;
        receiver_resamples += o.receiver_resamples;
        members_total += o.members_total;
        max_cluster = std::max(max_cluster, o.max_cluster);
        max_member_distance = std::max(max_member_distance, o.max_member_distance);
    }
};

struct PointResult {
    SweepPoint point;
    AntennaConfig antenna;
    double threshold = 0.0;
    double noise = 0.0;
    MetricAccumulator metrics;
    RunCounters counters;
    double seconds = 0.0;

    double receiver_lane_lambda(int lane) const { return point.lane_intensities.at(static_cast<std::size_t>(lane - 1)); }
};

struct SweepResult {
    std::vector<PointResult> points;
    double seconds = 0.0;
};

namespace detail {

/// Everything fixed for one sweep point.
struct PointContext {
    const ScenarioConfig& cfg;
    RoadConfig road;
    AntennaConfig antenna;
    double threshold;
    double noise;
    int rate_divisor;
};

struct WorkerState {
    MetricAccumulator metrics;
    RunCounters counters;
};

/// Evaluates the tagged receiver of one snapshot. Returns false when the
/// snapshot has no candidate receiver.
inline bool measure(const PointContext& ctx, const Snapshot& snap, std::uint64_t fading_seed, WorkerState& w) {
    const auto rx_index = tagged_receiver(snap, ctx.cfg.receiver_lane);
    if (!rx_index) return false;
    const auto& rx = snap.vehicles[*rx_index];
    auto rng = make_stream(fading_seed);
    BlockageMap blockage(snap, ctx.cfg.cars_block);
    auto cluster = form_cluster(rx, snap, blockage, ctx.threshold, ctx.cfg.mac, ctx.cfg.channel, ctx.antenna, &rng);

    ++w.counters.snapshots;
    if (cluster.truncated()) ++w.counters.truncations;
    if (!evaluate_snapshot(cluster, ctx.cfg.channel, rng)) {
        ++w.counters.skipped_empty;
        if (ctx.cfg.metrics.empty_cluster_as_outage) w.metrics.add_outage();
        return true;
    }
    ++w.counters.evaluated;
    w.counters.members_total += cluster.members.size();
    w.counters.max_cluster = std::max<std::uint64_t>(w.counters.max_cluster, cluster.members.size());
    for (const auto& m : cluster.members)
        w.counters.max_member_distance = std::max(w.counters.max_member_distance, m.link.distance);
    w.metrics.add(cluster, ctx.cfg.channel.bandwidth, ctx.rate_divisor);
    return true;
}

/// One independent snapshot (mobility off or redraw).
inline void run_independent(const PointContext& ctx, std::uint64_t point_seed, std::uint64_t index, WorkerState& w,
                            std::ostream* trajectory) {
    const std::uint64_t base = derive_seed(point_seed, index);
    for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t seed = derive_seed(base, attempt);
        auto snap = generate_snapshot(ctx.road, ctx.cfg.mac.p_rx, ctx.antenna.num_sectors, seed);
        if (ctx.cfg.mobility.mode == MobilityMode::Redraw) {
            auto rng = make_stream(derive_seed(seed, stream::mobility));
            snap = warmup(std::move(snap), ctx.cfg.mobility.krauss, rng, attempt == 0 ? trajectory : nullptr);
        }
        if (measure(ctx, snap, derive_seed(seed, stream::fading), w)) return;
        ++w.counters.receiver_resamples;
    }
}

/// One mobility trace yielding `samples` measurements.
inline void run_chain(const PointContext& ctx, std::uint64_t point_seed, std::uint64_t chain, std::uint64_t samples,
                      WorkerState& w, std::ostream* trajectory) {
    const std::uint64_t chain_seed = derive_seed(derive_seed(point_seed, 0x7ace0000ULL), chain);
    auto mob_rng = make_stream(derive_seed(chain_seed, stream::mobility));
    auto mode_rng = make_stream(derive_seed(chain_seed, stream::modes));
    auto steer_rng = make_stream(derive_seed(chain_seed, stream::steering));
    const auto& krauss = ctx.cfg.mobility.krauss;

    KineticSnapshot state(generate_snapshot(ctx.road, ctx.cfg.mac.p_rx, ctx.antenna.num_sectors, chain_seed));
    advance(state, krauss, krauss.warmup_duration, mob_rng, trajectory);
    std::uint64_t draws = 0;
    for (std::uint64_t k = 0; k < samples; ++k) {
        for (bool first = true;; first = false) {
            if (k > 0 || !first) advance(state, krauss, ctx.cfg.mobility.trace_interval, mob_rng);
            redraw_marks(state.snapshot, mode_rng, steer_rng, ctx.cfg.mac.p_rx, ctx.antenna.num_sectors);
            if (measure(ctx, state.snapshot, derive_seed(chain_seed, 0x100000000ULL + draws++), w)) break;
            ++w.counters.receiver_resamples;
        }
    }
}

template <typename Task>
void parallel_for(std::uint64_t count, int workers, Task&& task) {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&](int worker) {
        try {
            for (std::uint64_t i = next++; i < count; i = next++) task(worker, i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    if (workers <= 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(body, t);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Monte Carlo estimate for one sweep point. Results depend only on the
/// config and the point seed, never on `workers`.
inline PointResult run_point(const ScenarioConfig& cfg, const SweepPoint& point, int workers,
                             std::ostream* trajectory = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    PointResult result;
    result.point = point;
    RoadConfig road = cfg.road;
    road.lane_intensities = point.lane_intensities;
    road.truck_fractions = point.truck_fractions;
    road.validate();
    result.antenna = cfg.antenna.build(point.psi_deg);
    result.threshold = detection_threshold(cfg.mac, cfg.channel, result.antenna);
    result.noise = normalized_noise(cfg.channel);
    const detail::PointContext ctx{cfg, road, result.antenna, result.threshold, result.noise,
                                   cfg.metrics.subslot_rate_scaling ? cfg.mac.num_subslots : 1};

    const auto theta = cfg.metrics.theta_linear();
    const auto kappa = cfg.metrics.kappa_bps();
    workers = std::max(1, workers);
    std::vector<detail::WorkerState> states(static_cast<std::size_t>(workers),
                                            detail::WorkerState{MetricAccumulator(theta, kappa), {}});

    if (cfg.mobility.mode == MobilityMode::Trace) {
        const std::uint64_t chains = std::min<std::uint64_t>(cfg.num_snapshots, cfg.mobility.trace_chains);
        detail::parallel_for(chains, workers, [&](int w, std::uint64_t c) {
            const std::uint64_t samples = cfg.num_snapshots / chains + (c < cfg.num_snapshots % chains ? 1 : 0);
            detail::run_chain(ctx, point.seed, c, samples, states[static_cast<std::size_t>(w)],
                              c == 0 ? trajectory : nullptr);
        });
    } else {
        detail::parallel_for(cfg.num_snapshots, workers, [&](int w, std::uint64_t i) {
            detail::run_independent(ctx, point.seed, i, states[static_cast<std::size_t>(w)],
                                    i == 0 ? trajectory : nullptr);
        });
    }

    result.metrics = MetricAccumulator(theta, kappa);
    for (const auto& s : states) {
        result.metrics.merge(s.metrics);
        result.counters.merge(s.counters);
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline SweepResult run_sweep(const ScenarioConfig& cfg, int workers, std::ostream* trajectory = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    SweepResult out;
    for (const auto& point : expand_sweep(cfg))
        out.points.push_back(run_point(cfg, point, workers, point.index == 0 ? trajectory : nullptr));
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

// ---------------------------------------------------------------------------
// Output artifacts

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline constexpr const char* kCurveHeader =
    "sweep_id,lambda,psi_deg,member,grid_kind,grid_value,estimate,ci_low,ci_high,n_effective";

/// `grid_value` is linear SINR for theta rows and bit/s for kappa rows.
inline void write_curve_csv(std::ostream& out, const ScenarioConfig& cfg, const SweepResult& sweep, bool rate) {
    out << kCurveHeader << '\n';
    for (const auto& p : sweep.points) {
        const auto& acc = p.metrics;
        const auto& grid = rate ? acc.kappa_grid() : acc.theta_grid();
        for (Member m : {Member::Best, Member::Worst}) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double est = rate ? acc.coverage(m, i) : acc.outage(m, i);
                const Interval ci = rate ? acc.coverage_ci(m, i) : acc.outage_ci(m, i);
                out << p.point.index << ',' << format_number(p.receiver_lane_lambda(cfg.receiver_lane)) << ','
                    << format_number(p.point.psi_deg) << ',' << (m == Member::Best ? 'M' : 'm') << ','
                    << (rate ? "kappa" : "theta") << ',' << format_number(grid[i]) << ',' << format_number(est)
                    << ',' << format_number(ci.low) << ',' << format_number(ci.high) << ',' << acc.count() << '\n';
            }
        }
    }
}

inline void write_summary_csv(std::ostream& out, const ScenarioConfig& cfg, const SweepResult& sweep) {
    out << "sweep_id,lambda,psi_deg,truck_fraction,car_density,snapshots,evaluated,skipped_empty,truncations,"
           "receiver_resamples,mean_cluster_size,max_cluster_size,max_member_distance_m,detection_threshold,"
           "main_gain,side_gain,normalized_noise\n";
    for (const auto& p : sweep.points) {
        const auto lane = static_cast<std::size_t>(cfg.receiver_lane - 1);
        const double lambda = p.point.lane_intensities.at(lane);
        const double eps = p.point.truck_fractions.at(lane);
        const auto& c = p.counters;
        const double mean_size = c.evaluated ? static_cast<double>(c.members_total) / static_cast<double>(c.evaluated) : 0.0;
        out << p.point.index << ',' << format_number(lambda) << ',' << format_number(p.point.psi_deg) << ','
            << format_number(eps) << ',' << format_number((1.0 - eps) * lambda) << ',' << c.snapshots << ','
            << c.evaluated << ',' << c.skipped_empty << ',' << c.truncations << ',' << c.receiver_resamples << ','
            << format_number(mean_size) << ',' << c.max_cluster << ',' << format_number(c.max_member_distance) << ','
            << format_number(p.threshold) << ',' << format_number(p.antenna.main_gain) << ','
            << format_number(p.antenna.side_gain) << ',' << format_number(p.noise) << '\n';
    }
}

inline json make_manifest(const ScenarioConfig& cfg, const SweepResult& sweep) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    json points = json::array();
    for (const auto& p : sweep.points) {
        const auto& c = p.counters;
        points.push_back({{"sweep_id", p.point.index},
                          {"seed", p.point.seed},
                          {"psi_deg", p.point.psi_deg},
                          {"lane_intensities_per_m", p.point.lane_intensities},
                          {"truck_fractions", p.point.truck_fractions},
                          {"wall_clock_s", p.seconds},
                          {"snapshots", c.snapshots},
                          {"evaluated", c.evaluated},
                          {"skipped_empty", c.skipped_empty},
                          {"truncations", c.truncations},
                          {"receiver_resamples", c.receiver_resamples}});
    }
    return json{{"version", kVersion},
                {"config_hash", hash},
                {"master_seed", cfg.master_seed},
                {"wall_clock_s", sweep.seconds},
                {"points", points},
                {"config", to_json(cfg)}};
}

/// Creates `dir` if needed and proves it is writable.
inline void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".mmhw_write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw IoError("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

inline void write_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg, const SweepResult& sweep) {
    ensure_writable_dir(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw IoError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("rc_curve.csv");
        write_curve_csv(f, cfg, sweep, true);
    }
    {
        auto f = open("pt_curve.csv");
        write_curve_csv(f, cfg, sweep, false);
    }
    {
        auto f = open("summary.csv");
        write_summary_csv(f, cfg, sweep);
    }
    {
        auto f = open("manifest.json");
        f << make_manifest(cfg, sweep).dump(2) << '\n';
    }
}

}  // namespace mmhw
