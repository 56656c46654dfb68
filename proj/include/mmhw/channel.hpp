#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mmhw/error.hpp"
#include "mmhw/random.hpp"

namespace mmhw {

inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kReferenceTemperature = 290.0;   // K

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Free-space (Friis) gain at 1 m: (c / (4 pi f))^2.
inline double free_space_intercept(double carrier_frequency) {
    const double wavelength = kSpeedOfLight / carrier_frequency;
    const double r = wavelength / (4.0 * std::numbers::pi);
    return r * r;
}

struct ChannelParams {
    double carrier_frequency = 28e9;
    double bandwidth = 2.16e9;
    double pathloss_intercept = free_space_intercept(28e9);
    double pathloss_exponent = 2.6;
    double nakagami_m = 3.0;
    double tx_power = 1.0;        // W
    double noise_figure_db = 9.0;
    bool normalize_fading_power = false;  // false: Gamma(m, rate 1); true: Gamma(m, rate m)

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        if (!(carrier_frequency > 0.0)) out.emplace_back("channel.carrier_frequency_hz must be > 0");
        if (!(bandwidth > 0.0)) out.emplace_back("channel.bandwidth_hz must be > 0");
        if (!(pathloss_intercept > 0.0 && pathloss_intercept <= 1.0))
            out.emplace_back("channel.pathloss_intercept must lie in (0, 1]");
        if (!(pathloss_exponent > 2.0)) out.emplace_back("channel.pathloss_exponent must be > 2");
        if (!(nakagami_m >= 0.5)) out.emplace_back("channel.nakagami_m must be >= 0.5");
        if (!(tx_power > 0.0)) out.emplace_back("channel.tx_power_w must be > 0");
        return out;
    }
};

/// l(r) = min(1, C r^-alpha).
inline double path_loss(double r, const ChannelParams& p) {
    if (!(r > 0.0)) throw InvalidArgument("path loss needs a positive distance");
    return std::min(1.0, p.pathloss_intercept * std::pow(r, -p.pathloss_exponent));
}

/// Nakagami-m power gain |h|^2 ~ Gamma(shape m, rate 1), or rate m when
/// `unit_mean` is set.
inline double sample_fading(double m, Rng& rng, bool unit_mean = false) {
    if (!(m >= 0.5)) throw InvalidArgument("Nakagami m must be >= 0.5");
    std::gamma_distribution<double> gamma(m, unit_mean ? 1.0 / m : 1.0);
    return gamma(rng);
}

/// Thermal noise over the bandwidth, normalized by the transmit power.
inline double normalized_noise(const ChannelParams& p) {
    return kBoltzmann * kReferenceTemperature * p.bandwidth * db_to_linear(p.noise_figure_db) / p.tx_power;
}

}  // namespace mmhw
