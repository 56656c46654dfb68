#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "mmhw/channel.hpp"
#include "mmhw/error.hpp"
#include "mmhw/mac.hpp"
#include "mmhw/random.hpp"

namespace mmhw {

/// Evaluates SINR_i = |h_i|^2 Delta_i l(r_i) / (sigma + I) for every cluster
/// member, where I sums |h_j|^2 Delta_j l(r_j) over the LOS interferers.
/// `fading(link)` supplies |h|^2; it is called for members in subslot order,
/// then for LOS interferers in stored order. Returns false for an empty
/// cluster.
template <typename FadingSource>
    requires std::invocable<FadingSource&, const Link&>
bool evaluate_snapshot(ClusterResult& cluster, double noise, FadingSource&& fading) {
    if (cluster.empty()) return false;
    for (auto& m : cluster.members) m.fading = fading(m.link);
    double interference = 0.0;
    for (const auto& j : cluster.interferers) {
        if (!j.los || j.gain == 0.0) continue;
        interference += fading(j) * j.gain * j.path_gain;
    }
    cluster.interference = interference;
    cluster.noise = noise;
    const double denom = noise + interference;
    std::size_t best = 0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < cluster.members.size(); ++i) {
        auto& m = cluster.members[i];
        m.sinr = m.fading * m.link.gain * m.link.path_gain / denom;
        if (m.sinr > cluster.members[best].sinr) best = i;
        if (m.sinr < cluster.members[worst].sinr) worst = i;
    }
    if (best == worst && cluster.members.size() > 1) worst = best == 0 ? 1 : 0;
    cluster.best = best;
    cluster.worst = worst;
    return true;
}

/// Same, drawing one Nakagami power gain per link from `rng`.
inline bool evaluate_snapshot(ClusterResult& cluster, const ChannelParams& channel, Rng& rng) {
    return evaluate_snapshot(cluster, normalized_noise(channel), [&](const Link&) {
        return sample_fading(channel.nakagami_m, rng, channel.normalize_fading_power);
    });
}

/// Shannon rate W log2(1 + SINR), optionally shared across `divisor` subslots.
inline double rate_of(double sinr, double bandwidth, int divisor = 1) {
    if (!(sinr >= 0.0)) throw InvalidArgument("SINR must be >= 0");
    return bandwidth * std::log2(1.0 + sinr) / divisor;
}

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for k successes out of n.
inline Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

enum class Member { Best, Worst };

/// Streaming estimator of P_T(theta) = P(SINR < theta) and
/// R_C(kappa) = P(rate >= kappa) for the best and worst cluster member.
/// Integer counts only, so merging is exact and order-independent.
class MetricAccumulator {
public:
    MetricAccumulator() = default;

    MetricAccumulator(std::vector<double> theta_grid, std::vector<double> kappa_grid)
        : theta_(std::move(theta_grid)),
          kappa_(std::move(kappa_grid)),
          outage_{std::vector<std::uint64_t>(theta_.size()), std::vector<std::uint64_t>(theta_.size())},
          coverage_{std::vector<std::uint64_t>(kappa_.size()), std::vector<std::uint64_t>(kappa_.size())} {}

    void add(double sinr_best, double sinr_worst, double bandwidth, int rate_divisor = 1) {
        const double sinr[2] = {sinr_best, sinr_worst};
        for (int k = 0; k < 2; ++k) {
            for (std::size_t i = 0; i < theta_.size(); ++i)
                if (sinr[k] < theta_[i]) ++outage_[k][i];
            const double rate = rate_of(sinr[k], bandwidth, rate_divisor);
            for (std::size_t i = 0; i < kappa_.size(); ++i)
                if (rate >= kappa_[i]) ++coverage_[k][i];
        }
        ++count_;
    }

    void add(const ClusterResult& result, double bandwidth, int rate_divisor = 1) {
        add(result.best_member().sinr, result.worst_member().sinr, bandwidth, rate_divisor);
    }

    /// A snapshot with no service: outage at every theta, no coverage.
    void add_outage() { add(0.0, 0.0, 1.0); }

    void merge(const MetricAccumulator& other) {
        if (other.theta_ != theta_ || other.kappa_ != kappa_)
            throw InvalidArgument("cannot merge accumulators over different grids");
        for (int k = 0; k < 2; ++k) {
            for (std::size_t i = 0; i < theta_.size(); ++i) outage_[k][i] += other.outage_[k][i];
            for (std::size_t i = 0; i < kappa_.size(); ++i) coverage_[k][i] += other.coverage_[k][i];
        }
        count_ += other.count_;
    }

    std::uint64_t count() const noexcept { return count_; }
    const std::vector<double>& theta_grid() const noexcept { return theta_; }
    const std::vector<double>& kappa_grid() const noexcept { return kappa_; }

    std::uint64_t outage_count(Member m, std::size_t i) const { return outage_[index(m)].at(i); }
    std::uint64_t coverage_count(Member m, std::size_t i) const { return coverage_[index(m)].at(i); }

    double outage(Member m, std::size_t i) const { return ratio(outage_count(m, i)); }
    double coverage(Member m, std::size_t i) const { return ratio(coverage_count(m, i)); }
    Interval outage_ci(Member m, std::size_t i) const { return wilson_interval(outage_count(m, i), count_); }
    Interval coverage_ci(Member m, std::size_t i) const { return wilson_interval(coverage_count(m, i), count_); }

private:
    static int index(Member m) noexcept { return m == Member::Best ? 0 : 1; }
    double ratio(std::uint64_t k) const noexcept {
        return count_ == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(count_);
    }

    std::vector<double> theta_;
    std::vector<double> kappa_;
    std::vector<std::uint64_t> outage_[2];
    std::vector<std::uint64_t> coverage_[2];
    std::uint64_t count_ = 0;
};

}  // namespace mmhw
