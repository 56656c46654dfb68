#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "mmhw/error.hpp"
#include "mmhw/road.hpp"

namespace mmhw {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Angle folded into [0, 2 pi).
inline double normalize_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

/// Two-level sectored pattern over R = 2 pi / psi azimuth sectors.
///
/// Sector k spans [k psi, (k + 1) psi) in the antenna frame. The antenna frame
/// is rotated so that the center of sector 0 points at `reference_angle`
/// (0 = East, pi/2 = North).
struct AntennaConfig {
    double beamwidth = kTwoPi / 8;
    int num_sectors = 8;
    double main_gain = 8.0;
    double side_gain = 0.0;
    double reference_angle = 0.0;
};

/// Number of sectors for a beamwidth in degrees, or nullopt when it does not
/// divide 360.
inline std::optional<int> sectors_for_beamwidth(double psi_deg) {
    if (!(psi_deg > 0.0 && psi_deg <= 360.0)) return std::nullopt;
    const double r = 360.0 / psi_deg;
    const double rounded = std::round(r);
    if (std::abs(r - rounded) > 1e-9 * r) return std::nullopt;
    return static_cast<int>(rounded);
}

/// Builds a pattern whose gain averages to one over the azimuth:
///   G_main psi + g_side (2 pi - psi) = 2 pi.
/// `sidelobe_rel_db` is g_side / G_main in dB; nullopt means no sidelobe.
inline AntennaConfig make_antenna(double psi_deg, std::optional<double> sidelobe_rel_db = -20.0,
                                  double reference_deg = 0.0) {
    const auto sectors = sectors_for_beamwidth(psi_deg);
    if (!sectors)
        throw InvalidConfig("beamwidth " + std::to_string(psi_deg) + " deg does not divide 360 deg");
    AntennaConfig cfg;
    cfg.num_sectors = *sectors;
    cfg.beamwidth = kTwoPi / *sectors;
    const double ratio = sidelobe_rel_db ? std::pow(10.0, *sidelobe_rel_db / 10.0) : 0.0;
    if (ratio > 1.0) throw InvalidConfig("sidelobe gain must not exceed the main-lobe gain");
    cfg.main_gain = kTwoPi / (cfg.beamwidth + ratio * (kTwoPi - cfg.beamwidth));
    cfg.side_gain = ratio * cfg.main_gain;
    cfg.reference_angle = deg_to_rad(reference_deg);
    return cfg;
}

/// Gain toward `angle` (antenna frame, [0, 2 pi)) for a boresight sector.
inline double sector_gain(int boresight_sector, double angle, const AntennaConfig& cfg) {
    int sector = static_cast<int>(std::floor(angle / cfg.beamwidth));
    if (sector >= cfg.num_sectors) sector = cfg.num_sectors - 1;
    if (sector < 0) sector = 0;
    return sector == boresight_sector ? cfg.main_gain : cfg.side_gain;
}

/// Maps a world bearing onto the antenna frame.
inline double antenna_frame_angle(double bearing, const AntennaConfig& cfg) {
    return normalize_angle(bearing - cfg.reference_angle + cfg.beamwidth / 2);
}

/// Bearing from a to b in the world frame, using the shorter ring arc.
inline double bearing(const Vehicle& from, const Vehicle& to, const RoadConfig& road) {
    const double dx = ring_delta(from.position, to.position, road.road_length);
    const double dy = road.lane_center(to.lane) - road.lane_center(from.lane);
    if (dx == 0.0 && dy == 0.0) throw InvalidArgument("coincident vehicle positions");
    return std::atan2(dy, dx);
}

/// Delta = G_tx(bearing tx->rx) * G_rx(bearing rx->tx).
inline double combined_gain(const Vehicle& tx, const Vehicle& rx, const AntennaConfig& cfg, const RoadConfig& road) {
    const double out = bearing(tx, rx, road);
    const double back = out + std::numbers::pi;
    return sector_gain(tx.sector, antenna_frame_angle(out, cfg), cfg) *
           sector_gain(rx.sector, antenna_frame_angle(back, cfg), cfg);
}

}  // namespace mmhw
