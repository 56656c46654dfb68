#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mmhw/error.hpp"
#include "mmhw/random.hpp"

namespace mmhw {

enum class VehicleKind : std::uint8_t { Car, Truck };
enum class Mode : std::uint8_t { TX, RX, Inactive };
enum class Heading : std::uint8_t { EastToWest, WestToEast };

struct Dimensions {
    double length = 0.0;
    double width = 0.0;
};

/// Highway section. Lanes are numbered 1..num_lanes; lane centerlines sit at
/// y = (lane - 0.5) * lane_width. Densities are vehicles per meter.
struct RoadConfig {
    double road_length = 20000.0;
    int num_lanes = 4;
    double lane_width = 3.7;
    std::vector<double> lane_intensities{0.06, 0.06, 0.06, 0.06};
    std::vector<double> truck_fractions{0.1, 0.05, 0.05, 0.1};
    Dimensions car{4.0, 2.52};
    Dimensions truck{11.2, 2.52};
    double min_gap = 1.0;  // bumper-to-bumper, used by the hard-core correction

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(road_length > 0.0)) out.emplace_back("road.length_m must be > 0");
        if (num_lanes < 2 || num_lanes % 2 != 0)
            out.emplace_back("road.num_lanes must be a positive even number, got " +
                             std::to_string(num_lanes));
        if (!(lane_width > 0.0)) out.emplace_back("road.lane_width_m must be > 0");
        if (static_cast<int>(lane_intensities.size()) != num_lanes)
            out.emplace_back("road.lane_intensities_per_m must have num_lanes entries");
        if (static_cast<int>(truck_fractions.size()) != num_lanes)
            out.emplace_back("road.truck_fractions must have num_lanes entries");
        for (double l : lane_intensities)
            if (!(l > 0.0)) out.emplace_back("road.lane_intensities_per_m entries must be > 0");
        for (double e : truck_fractions)
            if (!(e >= 0.0 && e <= 1.0))
                out.emplace_back("road.truck_fractions entries must lie in [0, 1]");
        if (!(car.length > 0.0 && car.width > 0.0 && truck.length > 0.0 && truck.width > 0.0))
            out.emplace_back("vehicle dimensions must be > 0");
        if (car.width > lane_width || truck.width > lane_width)
            out.emplace_back("vehicle width exceeds lane width");
        if (!(min_gap >= 0.0)) out.emplace_back("road.min_gap_m must be >= 0");
        return out;
    }

    void validate() const {
        if (auto v = violations(); !v.empty()) throw InvalidConfig(std::move(v));
    }

    const Dimensions& dims(VehicleKind kind) const noexcept {
        return kind == VehicleKind::Truck ? truck : car;
    }

    double lane_center(int lane) const noexcept { return (lane - 0.5) * lane_width; }

    Heading heading(int lane) const noexcept {
        return lane <= num_lanes / 2 ? Heading::EastToWest : Heading::WestToEast;
    }
};

struct Vehicle {
    std::uint32_t id = 0;
    int lane = 1;
    double position = 0.0;  // footprint center, in [0, road_length)
    VehicleKind kind = VehicleKind::Car;
    Mode mode = Mode::Inactive;
    int sector = 0;  // boresight sector; meaningless for trucks

    bool is_car() const noexcept { return kind == VehicleKind::Car; }
    bool is_truck() const noexcept { return kind == VehicleKind::Truck; }
};

struct Rect {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

/// One frozen spatial realization. Vehicles are sorted by (lane, position).
struct Snapshot {
    std::vector<Vehicle> vehicles;
    RoadConfig road;
    std::uint64_t realization_seed = 0;

    /// Vehicles of one lane, sorted by position.
    std::span<const Vehicle> lane(int lane_index) const {
        auto lo = std::partition_point(vehicles.begin(), vehicles.end(),
                                       [&](const Vehicle& v) { return v.lane < lane_index; });
        auto hi = std::partition_point(lo, vehicles.end(),
                                       [&](const Vehicle& v) { return v.lane <= lane_index; });
        return {lo, hi};
    }

    const Vehicle* find(std::uint32_t id) const {
        for (const auto& v : vehicles)
            if (v.id == id) return &v;
        return nullptr;
    }
};

/// Signed displacement b - a along a ring of circumference `length`, taken
/// on the shorter arc: result lies in [-length/2, length/2).
inline double ring_delta(double a, double b, double length) noexcept {
    double d = std::fmod(b - a, length);
    if (d < -length / 2) d += length;
    if (d >= length / 2) d -= length;
    return d;
}

inline double wrap_position(double x, double length) noexcept {
    double w = std::fmod(x, length);
    if (w < 0.0) w += length;
    if (w >= length) w -= length;  // fmod of a tiny negative can round to length
    return w;
}

/// Homogeneous Poisson placement on [0, length). Sorted.
inline std::vector<double> sample_lane_positions(double length, double intensity, Rng& rng) {
    if (!(length > 0.0)) throw InvalidConfig("lane length must be > 0");
    if (!(intensity > 0.0)) throw InvalidConfig("lane intensity must be > 0");
    std::poisson_distribution<long> count_dist(length * intensity);
    const long n = count_dist(rng);
    std::uniform_real_distribution<double> pos_dist(0.0, length);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) x = pos_dist(rng);
    std::sort(out.begin(), out.end());
    return out;
}

inline Rect footprint(const Vehicle& vehicle, const RoadConfig& road) {
    const auto& d = road.dims(vehicle.kind);
    const double y = road.lane_center(vehicle.lane);
    return {vehicle.position - d.length / 2, vehicle.position + d.length / 2, y - d.width / 2,
            y + d.width / 2};
}

/// Minimum center-to-center spacing between two consecutive same-lane
/// vehicles so their footprints are separated by `gap`.
inline double min_center_spacing(const RoadConfig& road, VehicleKind a, VehicleKind b,
                                 double gap) noexcept {
    return (road.dims(a).length + road.dims(b).length) / 2 + gap;
}

/// Hard-core correction for one lane. Pushes vehicles forward left to right
/// until consecutive footprints are at least `road.min_gap` apart. Vehicles
/// pushed past the end of the ring, or colliding with the first vehicle
/// across the wrap, are dropped.
inline void resolve_overlaps(std::vector<std::pair<double, VehicleKind>>& lane, const RoadConfig& road) {
    if (lane.empty()) return;
    std::vector<std::pair<double, VehicleKind>> kept;
    kept.reserve(lane.size());
    kept.push_back(lane.front());
    for (std::size_t i = 1; i < lane.size(); ++i) {
        const auto& prev = kept.back();
        const double need = prev.first + min_center_spacing(road, prev.second, lane[i].second, road.min_gap);
        const double x = std::max(lane[i].first, need);
        if (x >= road.road_length) break;
        kept.emplace_back(x, lane[i].second);
    }
    while (kept.size() > 1) {
        const auto& first = kept.front();
        const auto& last = kept.back();
        const double spacing = first.first + road.road_length - last.first;
        if (spacing >= min_center_spacing(road, last.second, first.second, road.min_gap)) break;
        kept.pop_back();
    }
    lane = std::move(kept);
}

/// Turns raw per-lane positions into a snapshot: draws kinds, applies the
/// hard-core correction, then draws mode and boresight for every car.
inline Snapshot mark_vehicles(const std::vector<std::vector<double>>& positions, const RoadConfig& road,
                              Rng& kinds_rng, Rng& mode_rng, Rng& steer_rng, double p_rx,
                              int num_sectors) {
    if (static_cast<int>(positions.size()) != road.num_lanes ||
        static_cast<int>(road.truck_fractions.size()) != road.num_lanes)
        throw InvalidConfig("lane count mismatch between positions and road configuration");
    if (!(p_rx >= 0.0 && p_rx <= 1.0)) throw InvalidConfig("p_rx must lie in [0, 1]");
    if (num_sectors < 1) throw InvalidConfig("num_sectors must be >= 1");

    Snapshot snap;
    snap.road = road;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> sector_dist(0, num_sectors - 1);
    std::uint32_t next_id = 0;

    for (int lane = 1; lane <= road.num_lanes; ++lane) {
        const double eps = road.truck_fractions[lane - 1];
        std::vector<std::pair<double, VehicleKind>> marked;
        marked.reserve(positions[lane - 1].size());
        for (double x : positions[lane - 1])
            marked.emplace_back(x, unit(kinds_rng) < eps ? VehicleKind::Truck : VehicleKind::Car);
        std::sort(marked.begin(), marked.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        resolve_overlaps(marked, road);

        for (const auto& [x, kind] : marked) {
            Vehicle v;
            v.id = next_id++;
            v.lane = lane;
            v.position = x;
            v.kind = kind;
            if (kind == VehicleKind::Car) {
                v.mode = unit(mode_rng) < p_rx ? Mode::RX : Mode::TX;
                v.sector = sector_dist(steer_rng);
            }
            snap.vehicles.push_back(v);
        }
    }
    return snap;
}

/// Re-draws the per-slot marks (mode and boresight) of every car, keeping
/// positions and kinds.
inline void redraw_marks(Snapshot& snap, Rng& mode_rng, Rng& steer_rng, double p_rx, int num_sectors) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> sector_dist(0, num_sectors - 1);
    for (auto& v : snap.vehicles) {
        if (!v.is_car()) continue;
        v.mode = unit(mode_rng) < p_rx ? Mode::RX : Mode::TX;
        v.sector = sector_dist(steer_rng);
    }
}

/// Full realization from a single seed.
inline Snapshot generate_snapshot(const RoadConfig& road, double p_rx, int num_sectors, std::uint64_t seed) {
    auto pos_rng = make_stream(derive_seed(seed, stream::positions));
    auto kind_rng = make_stream(derive_seed(seed, stream::kinds));
    auto mode_rng = make_stream(derive_seed(seed, stream::modes));
    auto steer_rng = make_stream(derive_seed(seed, stream::steering));
    std::vector<std::vector<double>> positions;
    positions.reserve(road.num_lanes);
    for (int lane = 1; lane <= road.num_lanes; ++lane)
        positions.push_back(sample_lane_positions(road.road_length, road.lane_intensities[lane - 1], pos_rng));
    auto snap = mark_vehicles(positions, road, kind_rng, mode_rng, steer_rng, p_rx, num_sectors);
    snap.realization_seed = seed;
    return snap;
}

/// The RX car of `lane` closest to the middle of the section, if any.
inline std::optional<std::size_t> tagged_receiver(const Snapshot& snap, int lane) {
    const double mid = snap.road.road_length / 2;
    std::optional<std::size_t> best;
    double best_dist = 0.0;
    for (std::size_t i = 0; i < snap.vehicles.size(); ++i) {
        const auto& v = snap.vehicles[i];
        if (v.lane != lane || v.mode != Mode::RX) continue;
        const double d = std::abs(ring_delta(mid, v.position, snap.road.road_length));
        if (!best || d < best_dist) {
            best = i;
            best_dist = d;
        }
    }
    return best;
}

/// Largest overlap (negative gap) between consecutive same-lane footprints
/// on the ring; 0 when none overlap.
inline double worst_overlap(const Snapshot& snap) {
    double worst = 0.0;
    for (int lane = 1; lane <= snap.road.num_lanes; ++lane) {
        auto vs = snap.lane(lane);
        if (vs.size() < 2) continue;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const auto& a = vs[i];
            const auto& b = vs[(i + 1) % vs.size()];
            double spacing = b.position - a.position;
            if (i + 1 == vs.size()) spacing += snap.road.road_length;
            const double gap = spacing - min_center_spacing(snap.road, a.kind, b.kind, 0.0);
            worst = std::min(worst, gap);
        }
    }
    return -worst;
}

}  // namespace mmhw
