#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmhw/antenna.hpp"
#include "mmhw/blockage.hpp"
#include "mmhw/channel.hpp"
#include "mmhw/error.hpp"
#include "mmhw/random.hpp"
#include "mmhw/road.hpp"

namespace mmhw {

struct MacConfig {
    double slot_duration = 0.01;   // tau, s
    int num_subslots = 32;         // S
    double coverage_range = 100.0; // m, used to derive the detection threshold
    std::optional<double> detection_threshold;  // overrides the derived one
    bool fading_in_detection = false;
    double p_rx = 0.5;

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(slot_duration > 0.0)) out.emplace_back("mac.slot_duration_s must be > 0");
        if (num_subslots < 1) out.emplace_back("mac.num_subslots must be >= 1");
        if (!(coverage_range > 0.0)) out.emplace_back("mac.coverage_range_m must be > 0");
        if (detection_threshold && !(*detection_threshold > 0.0))
            out.emplace_back("mac.detection_threshold must be > 0");
        if (!(p_rx >= 0.0 && p_rx <= 1.0)) out.emplace_back("mac.p_rx must lie in [0, 1]");
        return out;
    }
};

/// Mean received power (P_t = 1) of a LOS link at `range` with both beams
/// aligned: G_main^2 * l(range).
inline double derive_threshold(double range, const ChannelParams& channel, const AntennaConfig& antenna) {
    if (!(range > 0.0)) throw InvalidArgument("coverage range must be > 0");
    return antenna.main_gain * antenna.main_gain * path_loss(range, channel);
}

inline double detection_threshold(const MacConfig& mac, const ChannelParams& channel, const AntennaConfig& antenna) {
    return mac.detection_threshold ? *mac.detection_threshold
                                   : derive_threshold(mac.coverage_range, channel, antenna);
}

/// Geometry of one TX -> receiver link.
struct Link {
    std::uint32_t id = 0;
    double distance = 0.0;
    double gain = 0.0;       // Delta
    double path_gain = 0.0;  // l(r)
    bool los = false;

    double mean_power() const noexcept { return los ? gain * path_gain : 0.0; }
};

struct ClusterMember {
    Link link;
    int subslot = 0;
    double detection_power = 0.0;
    double fading = 0.0;
    double sinr = 0.0;
};

struct ClusterResult {
    std::uint32_t receiver_id = 0;
    std::vector<ClusterMember> members;  // in subslot order
    std::vector<Link> interferers;       // every TX car outside the cluster
    std::size_t dropped = 0;             // members lost to S-truncation
    double interference = 0.0;
    double noise = 0.0;
    std::optional<std::size_t> best;   // index into members, max SINR
    std::optional<std::size_t> worst;  // index into members, min SINR

    bool empty() const noexcept { return members.empty(); }
    bool truncated() const noexcept { return dropped > 0; }
    const ClusterMember& best_member() const { return members.at(*best); }
    const ClusterMember& worst_member() const { return members.at(*worst); }
};

inline Link describe_link(const Vehicle& tx, const Vehicle& rx, const RoadConfig& road, const BlockageMap& blockage,
                          const ChannelParams& channel, const AntennaConfig& antenna) {
    Link link;
    link.id = tx.id;
    const double dx = ring_delta(rx.position, tx.position, road.road_length);
    const double dy = road.lane_center(tx.lane) - road.lane_center(rx.lane);
    link.distance = std::hypot(dx, dy);
    link.gain = combined_gain(tx, rx, antenna, road);
    link.path_gain = path_loss(link.distance, channel);
    link.los = blockage.is_los(tx, rx);
    return link;
}

/// Detects the transmitting cluster of `receiver` and partitions every other
/// TX car into the interferer set. Members are the LOS TX cars whose mean
/// detection power Delta * l(r) reaches `threshold`; they get subslots in
/// decreasing order of detection power. When more than S qualify, only the S
/// strongest are kept and the rest interfere.
inline ClusterResult form_cluster(const Vehicle& receiver, const Snapshot& snap, const BlockageMap& blockage,
                                  double threshold, const MacConfig& mac, const ChannelParams& channel,
                                  const AntennaConfig& antenna, Rng* detection_fading = nullptr) {
    if (!receiver.is_car() || receiver.mode != Mode::RX)
        throw InvalidArgument("cluster formation needs a receiving car");
    if (mac.fading_in_detection && detection_fading == nullptr)
        throw InvalidArgument("fading_in_detection needs a random stream");

    ClusterResult result;
    result.receiver_id = receiver.id;
    std::vector<ClusterMember> candidates;
    for (const auto& v : snap.vehicles) {
        if (v.mode != Mode::TX) continue;
        Link link = describe_link(v, receiver, snap.road, blockage, channel, antenna);
        double power = link.mean_power();
        if (mac.fading_in_detection && link.los)
            power *= sample_fading(channel.nakagami_m, *detection_fading, channel.normalize_fading_power);
        if (link.los && power > 0.0 && power >= threshold) {
            ClusterMember m;
            m.link = link;
            m.detection_power = power;
            candidates.push_back(m);
        } else {
            result.interferers.push_back(link);
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const ClusterMember& a, const ClusterMember& b) { return a.detection_power > b.detection_power; });
    const auto cap = static_cast<std::size_t>(mac.num_subslots);
    if (candidates.size() > cap) {
        result.dropped = candidates.size() - cap;
        for (std::size_t i = cap; i < candidates.size(); ++i) result.interferers.push_back(candidates[i].link);
        candidates.resize(cap);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].subslot = static_cast<int>(i);
    result.members = std::move(candidates);
    return result;
}

}  // namespace mmhw
