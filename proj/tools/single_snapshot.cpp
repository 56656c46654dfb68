// Library walk-through: one warmed-up highway snapshot, the tagged receiver's
// cluster and the SINR of every member.
//
//   mmhw_snapshot [seed] [beamwidth_deg]

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mmhw/mmhw.hpp"

int main(int argc, char** argv) {
    using namespace mmhw;
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    const double psi = argc > 2 ? std::atof(argv[2]) : 45.0;

    const ScenarioConfig cfg = default_scenario();
    const AntennaConfig antenna = cfg.antenna.build(psi);

    Snapshot snap = generate_snapshot(cfg.road, cfg.mac.p_rx, antenna.num_sectors, seed);
    Rng motion = make_stream(derive_seed(seed, stream::mobility));
    snap = warmup(snap, cfg.mobility.krauss, motion);

    const auto rx = tagged_receiver(snap, cfg.receiver_lane);
    if (!rx) {
        std::puts("no receiving car on the receiver lane");
        return 0;
    }
    const BlockageMap blockage(snap, cfg.cars_block);
    const double threshold = detection_threshold(cfg.mac, cfg.channel, antenna);
    auto cluster = form_cluster(snap.vehicles[*rx], snap, blockage, threshold, cfg.mac, cfg.channel, antenna);
    Rng fading = make_stream(derive_seed(seed, stream::fading));
    const bool served = evaluate_snapshot(cluster, cfg.channel, fading);

    std::printf("%zu vehicles, receiver %u at %.1f m, threshold %.3e, psi %.1f deg\n", snap.vehicles.size(),
                cluster.receiver_id, snap.vehicles[*rx].position, threshold, psi);
    if (!served) {
        std::puts("empty cluster");
        return 0;
    }
    std::printf("interference %.3e, noise %.3e\n", cluster.interference, cluster.noise);
    for (const auto& m : cluster.members)
        std::printf("  subslot %2d  tx %6u  r %6.1f m  gain %7.3f  SINR %8.2f dB  rate %.2f Gb/s\n", m.subslot,
                    m.link.id, m.link.distance, m.link.gain, 10 * std::log10(m.sinr),
                    rate_of(m.sinr, cfg.channel.bandwidth) / 1e9);
    std::printf("best tx %u, worst tx %u\n", cluster.best_member().link.id, cluster.worst_member().link.id);
}
