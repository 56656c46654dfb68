#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mmhw/error.hpp"
#include "mmhw/road.hpp"

namespace mmhw {

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

struct Segment2D {
    Point2D a;
    Point2D b;
};

/// Closed segment vs closed axis-aligned rectangle, by slab clipping.
/// Touching the boundary counts as an intersection.
inline bool segment_intersects_rect(const Segment2D& seg, const Rect& rect) {
    const double dx = seg.b.x - seg.a.x;
    const double dy = seg.b.y - seg.a.y;
    if (dx == 0.0 && dy == 0.0) throw InvalidArgument("degenerate segment");
    double t0 = 0.0;
    double t1 = 1.0;
    auto clip = [&](double p, double d, double lo, double hi) {
        if (d == 0.0) return p >= lo && p <= hi;
        double ta = (lo - p) / d;
        double tb = (hi - p) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        return t0 <= t1;
    };
    return clip(seg.a.x, dx, rect.x_min, rect.x_max) && clip(seg.a.y, dy, rect.y_min, rect.y_max);
}

/// Antenna location of a vehicle: footprint center on its lane centerline.
inline Point2D antenna_point(const Vehicle& v, const RoadConfig& road) {
    return {v.position, road.lane_center(v.lane)};
}

/// Blocker lookup over one snapshot. Trucks always block; cars block only
/// when `cars_block` is set. Links are evaluated on the shorter ring arc.
class BlockageMap {
public:
    explicit BlockageMap(const Snapshot& snap, bool cars_block = false)
        : road_(snap.road), cars_block_(cars_block), lanes_(static_cast<std::size_t>(snap.road.num_lanes)) {
        for (const auto& v : snap.vehicles) {
            if (!v.is_truck() && !cars_block_) continue;
            lanes_[static_cast<std::size_t>(v.lane - 1)].push_back(v);
            max_half_length_ = std::max(max_half_length_, road_.dims(v.kind).length / 2);
        }
    }

    bool is_los(const Vehicle& tx, const Vehicle& rx) const {
        if (tx.is_truck() || rx.is_truck()) throw InvalidArgument("LOS is only defined between cars");
        if (tx.id == rx.id) throw InvalidArgument("LOS needs two distinct vehicles");

        // Work in a frame where rx sits at its own position and tx is unwrapped
        // onto the shorter arc.
        const double L = road_.road_length;
        const Point2D p_rx = antenna_point(rx, road_);
        const Point2D p_tx{rx.position + ring_delta(rx.position, tx.position, L), road_.lane_center(tx.lane)};
        if (p_rx.x == p_tx.x && p_rx.y == p_tx.y) throw InvalidArgument("coincident antenna positions");
        const Segment2D seg{p_tx, p_rx};
        const double x_lo = std::min(p_tx.x, p_rx.x);
        const double x_hi = std::max(p_tx.x, p_rx.x);
        const double y_lo = std::min(p_tx.y, p_rx.y);
        const double y_hi = std::max(p_tx.y, p_rx.y);

        for (int lane = 1; lane <= road_.num_lanes; ++lane) {
            const auto& blockers = lanes_[static_cast<std::size_t>(lane - 1)];
            if (blockers.empty()) continue;
            const double yc = road_.lane_center(lane);
            const double half_w = std::max(road_.car.width, road_.truck.width) / 2;
            if (yc + half_w < y_lo || yc - half_w > y_hi) continue;

            // Candidate centers lie in [x_lo - h, x_hi + h], possibly across the seam.
            const double c_lo = x_lo - max_half_length_;
            const double c_hi = x_hi + max_half_length_;
            if (c_hi - c_lo >= L) {
                for (const auto& b : blockers)
                    if (blocks(b, seg, rx, tx)) return false;
                continue;
            }
            const double w_lo = wrap_position(c_lo, L);
            const double w_hi = w_lo + (c_hi - c_lo);
            if (scan(blockers, w_lo, std::min(w_hi, L), seg, rx, tx)) return false;
            if (w_hi > L && scan(blockers, 0.0, w_hi - L, seg, rx, tx)) return false;
        }
        return true;
    }

private:
    bool blocks(const Vehicle& b, const Segment2D& seg, const Vehicle& rx, const Vehicle& tx) const {
        if (b.id == rx.id || b.id == tx.id) return false;
        Vehicle shifted = b;
        shifted.position = rx.position + ring_delta(rx.position, b.position, road_.road_length);
        return segment_intersects_rect(seg, footprint(shifted, road_));
    }

    bool scan(const std::vector<Vehicle>& blockers, double lo, double hi, const Segment2D& seg,
              const Vehicle& rx, const Vehicle& tx) const {
        auto it = std::lower_bound(blockers.begin(), blockers.end(), lo,
                                   [](const Vehicle& v, double x) { return v.position < x; });
        for (; it != blockers.end() && it->position <= hi; ++it)
            if (blocks(*it, seg, rx, tx)) return true;
        return false;
    }

    RoadConfig road_;
    bool cars_block_;
    double max_half_length_ = 0.0;
    std::vector<std::vector<Vehicle>> lanes_;
};

inline bool is_los(const Vehicle& tx, const Vehicle& rx, const Snapshot& snap, bool cars_block = false) {
    return BlockageMap(snap, cars_block).is_los(tx, rx);
}

}  // namespace mmhw
