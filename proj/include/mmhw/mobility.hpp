#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "mmhw/error.hpp"
#include "mmhw/random.hpp"
#include "mmhw/road.hpp"

namespace mmhw {

inline constexpr double kmh_to_ms(double kmh) noexcept { return kmh / 3.6; }

struct KraussParams {
    double max_speed_car = kmh_to_ms(112.0);
    double max_speed_truck = kmh_to_ms(96.0);
    double max_accel = 2.5;             // a, m/s^2
    double max_decel = 4.5;             // b, m/s^2
    double driver_imperfection = 0.5;   // eta
    double reaction_time = 1.0;         // t_r, s
    double time_step = 1.0;             // dt, s
    double warmup_duration = 600.0;     // s

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        auto positive = [&](double v, const char* name) {
            if (!(v > 0.0)) out.push_back(std::string("mobility.") + name + " must be > 0");
        };
        positive(max_speed_car, "max_speed_car_kmh");
        positive(max_speed_truck, "max_speed_truck_kmh");
        positive(max_accel, "max_accel");
        positive(max_decel, "max_decel");
        positive(reaction_time, "reaction_time_s");
        positive(time_step, "time_step_s");
        if (!(warmup_duration >= 0.0)) out.emplace_back("mobility.warmup_s must be >= 0");
        if (!(driver_imperfection >= 0.0 && driver_imperfection <= 1.0))
            out.emplace_back("mobility.driver_imperfection must lie in [0, 1]");
        return out;
    }

    double max_speed(VehicleKind kind) const noexcept {
        return kind == VehicleKind::Truck ? max_speed_truck : max_speed_car;
    }
};

/// A snapshot plus one speed per vehicle (aligned with snapshot.vehicles).
struct KineticSnapshot {
    Snapshot snapshot;
    std::vector<double> speeds;
    double time = 0.0;

    explicit KineticSnapshot(Snapshot s) : snapshot(std::move(s)), speeds(snapshot.vehicles.size(), 0.0) {}
};

namespace detail {

// Distance travelled from a to b along the lane's driving direction, on the ring.
inline double forward_distance(double from, double to, Heading heading, double length) noexcept {
    double d = heading == Heading::WestToEast ? to - from : from - to;
    d = std::fmod(d, length);
    if (d < 0.0) d += length;
    return d;
}

inline double bumper_gap(const RoadConfig& road, const Vehicle& follower, const Vehicle& leader) {
    const double centers = forward_distance(follower.position, leader.position, road.heading(follower.lane),
                                            road.road_length);
    return centers - (road.dims(follower.kind).length + road.dims(leader.kind).length) / 2;
}

}  // namespace detail

/// One synchronous Krauss update of every vehicle.
///
/// Per vehicle: v_safe = v_l + (g - v_l t_r) / ((v + v_l) / (2 b) + t_r) with g the
/// bumper gap minus min_gap, v_des = min(v_max, v + a dt, v_safe), and
/// v' = max(0, v_des - eta a dt U(0,1)). A vehicle alone in its lane runs free.
inline void krauss_step(KineticSnapshot& state, const KraussParams& params, Rng& rng) {
    auto& snap = state.snapshot;
    const auto& road = snap.road;
    const double dt = params.time_step;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> next(state.speeds.size());

    std::size_t begin = 0;
    while (begin < snap.vehicles.size()) {
        const int lane = snap.vehicles[begin].lane;
        std::size_t end = begin;
        while (end < snap.vehicles.size() && snap.vehicles[end].lane == lane) ++end;
        const std::size_t n = end - begin;
        const Heading heading = road.heading(lane);

        // Leader of vehicle i is the next one in driving direction.
        auto leader_of = [&](std::size_t i) -> std::size_t {
            const std::size_t k = i - begin;
            if (heading == Heading::WestToEast) return begin + (k + 1) % n;
            return begin + (k + n - 1) % n;
        };

        std::vector<double> gaps(n, std::numeric_limits<double>::infinity());
        for (std::size_t i = begin; i < end; ++i) {
            const auto& v = snap.vehicles[i];
            const double vmax = params.max_speed(v.kind);
            const double speed = state.speeds[i];
            double v_safe = std::numeric_limits<double>::infinity();
            if (n > 1) {
                const std::size_t l = leader_of(i);
                const double gap = detail::bumper_gap(road, v, snap.vehicles[l]);
                if (gap < -1e-9)
                    throw ConsistencyError("footprint overlap in lane " + std::to_string(lane) +
                                           " before Krauss step");
                gaps[i - begin] = gap;
                const double v_l = state.speeds[l];
                const double g = gap - road.min_gap;
                v_safe = v_l + (g - v_l * params.reaction_time) /
                                   ((speed + v_l) / (2.0 * params.max_decel) + params.reaction_time);
            }
            const double v_des = std::min({vmax, speed + params.max_accel * dt, v_safe});
            const double dawdle = params.driver_imperfection * params.max_accel * dt * unit(rng);
            next[i] = std::clamp(v_des - dawdle, 0.0, vmax);
        }

        // The safe-speed rule assumes leaders never brake harder than b. Cap
        // any follower that would still close the gap to below zero.
        if (n > 1) {
            bool changed = true;
            for (std::size_t pass = 0; changed && pass <= n; ++pass) {
                changed = false;
                for (std::size_t i = begin; i < end; ++i) {
                    const double cap = gaps[i - begin] / dt + next[leader_of(i)];
                    if (next[i] > cap) {
                        next[i] = std::max(0.0, cap);
                        changed = true;
                    }
                }
            }
        }

        for (std::size_t i = begin; i < end; ++i) {
            auto& v = snap.vehicles[i];
            const double step = next[i] * dt;
            v.position = wrap_position(heading == Heading::WestToEast ? v.position + step : v.position - step,
                                       road.road_length);
        }

        // Order along the lane is preserved, so wrapping only rotates it.
        auto first = snap.vehicles.begin() + static_cast<std::ptrdiff_t>(begin);
        auto last = snap.vehicles.begin() + static_cast<std::ptrdiff_t>(end);
        auto brk = std::is_sorted_until(first, last,
                                        [](const Vehicle& a, const Vehicle& b) { return a.position < b.position; });
        if (brk != last) {
            const auto shift = brk - first;
            std::rotate(first, brk, last);
            std::rotate(next.begin() + static_cast<std::ptrdiff_t>(begin),
                        next.begin() + static_cast<std::ptrdiff_t>(begin) + shift,
                        next.begin() + static_cast<std::ptrdiff_t>(end));
            if (!std::is_sorted(first, last,
                                [](const Vehicle& a, const Vehicle& b) { return a.position < b.position; }))
                throw ConsistencyError("overtaking detected in lane " + std::to_string(lane));
        }
        begin = end;
    }
    state.speeds = std::move(next);
    state.time += dt;

    if (worst_overlap(snap) > 1e-6) throw ConsistencyError("footprint overlap after Krauss step");
}

/// CSV rows `time,vehicle_id,lane,position,speed` for every vehicle.
inline void write_trajectory_rows(std::ostream& out, const KineticSnapshot& state) {
    for (std::size_t i = 0; i < state.snapshot.vehicles.size(); ++i) {
        const auto& v = state.snapshot.vehicles[i];
        out << state.time << ',' << v.id << ',' << v.lane << ',' << v.position << ',' << state.speeds[i]
            << '\n';
    }
}

/// Runs Krauss dynamics for `duration` seconds.
inline void advance(KineticSnapshot& state, const KraussParams& params, double duration, Rng& rng,
                    std::ostream* trajectory = nullptr) {
    const auto steps = static_cast<long>(std::llround(duration / params.time_step));
    for (long s = 0; s < steps; ++s) {
        krauss_step(state, params, rng);
        if (trajectory) write_trajectory_rows(*trajectory, state);
    }
}

/// Evolves the snapshot for warmup_duration and drops the speeds.
inline Snapshot warmup(Snapshot snapshot, const KraussParams& params, Rng& rng,
                       std::ostream* trajectory = nullptr) {
    if (params.warmup_duration <= 0.0) return snapshot;
    KineticSnapshot state(std::move(snapshot));
    advance(state, params, params.warmup_duration, rng, trajectory);
    return std::move(state.snapshot);
}

}  // namespace mmhw
