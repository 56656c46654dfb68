#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmhw/channel.hpp"
#include "oracles.hpp"

using namespace mmhw;

// Frozen from an independent evaluation of (c / (4 pi f))^2 at 28 GHz.
constexpr double kIntercept28GHz = 7.259481705540117e-07;

TEST(PathLoss, FreeSpaceInterceptAt28GHz) {
    EXPECT_NEAR(free_space_intercept(28e9), kIntercept28GHz, 1e-12 * kIntercept28GHz);
    EXPECT_NEAR(linear_to_db(free_space_intercept(28e9)), -61.39, 0.01);
}

TEST(PathLoss, ClampKneeIsMillimetric) {
    ChannelParams p;
    const double knee = std::pow(p.pathloss_intercept, 1.0 / p.pathloss_exponent);
    EXPECT_NEAR(knee, 4.353212343815221e-03, 1e-12);
    EXPECT_DOUBLE_EQ(path_loss(knee / 2, p), 1.0);
    EXPECT_LT(path_loss(2 * knee, p), 1.0);
    EXPECT_NEAR(path_loss(knee, p), 1.0, 1e-12);  // continuous at the knee
}

TEST(PathLoss, PowerLawRatio) {
    ChannelParams p;
    EXPECT_NEAR(path_loss(100.0, p) / path_loss(200.0, p), 6.062866266041593, 1e-12);
}

TEST(PathLoss, MonotoneNonIncreasing) {
    ChannelParams p;
    double prev = path_loss(1e-4, p);
    for (double r = 1e-4; r < 1e4; r *= 1.07) {
        const double v = path_loss(r, p);
        ASSERT_LE(v, prev);
        ASSERT_GT(v, 0.0);
        ASSERT_LE(v, 1.0);
        prev = v;
    }
}

TEST(PathLoss, RejectsNonPositiveDistance) {
    ChannelParams p;
    EXPECT_THROW(path_loss(0.0, p), InvalidArgument);
    EXPECT_THROW(path_loss(-3.0, p), InvalidArgument);
}

TEST(Fading, RejectsSubPhysicalShape) {
    Rng rng(1);
    EXPECT_THROW(sample_fading(0.4, rng), InvalidArgument);
}

// Gamma(m, rate 1): mean m, variance m. 1e6 draws; 3 standard errors.
TEST(Fading, GammaMomentsForSeveralShapes) {
    for (double m : {1.0, 2.0, 3.0, 5.0}) {
        Rng rng(static_cast<std::uint64_t>(m * 1000));
        const int n = 1000000;
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
        for (int i = 0; i < n; ++i) {
            const double x = sample_fading(m, rng);
            ASSERT_GE(x, 0.0);
            s1 += x;
            s2 += x * x;
        }
        const double mean = s1 / n;
        const double var = s2 / n - mean * mean;
        (void)s3;
        (void)s4;
        const double se_mean = std::sqrt(m / n);
        // Var of the sample variance: (mu4 - sigma^4) / n with mu4 = 3m^2 + 6m for Gamma(m, 1).
        const double se_var = std::sqrt((3 * m * m + 6 * m - m * m) / n);
        EXPECT_NEAR(mean, m, 3 * se_mean) << "m=" << m;
        EXPECT_NEAR(var, m, 3 * se_var) << "m=" << m;
        EXPECT_NEAR(mean, m, 0.01 * m);
        EXPECT_NEAR(var, m, 0.02 * m);
    }
}

TEST(Fading, UnitMeanNormalization) {
    Rng rng(4);
    double s = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) s += sample_fading(3.0, rng, true);
    EXPECT_NEAR(s / n, 1.0, 0.01);
}

TEST(Fading, ShapeOneIsExponential) {
    Rng rng(8);
    const int n = 1000000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_fading(1.0, rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-xs[static_cast<std::size_t>(i)]);
        ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(ks, 0.01);
}

TEST(Fading, EmpiricalCdfMatchesIncompleteGamma) {
    const double oracle_p33 = oracle::regularized_lower_gamma(3.0, 3.0);
    EXPECT_NEAR(oracle_p33, 1.0 - 8.5 * std::exp(-3.0), 1e-14);  // closed form for integer shape
    Rng rng(12);
    const int n = 1000000;
    int below = 0;
    for (int i = 0; i < n; ++i) below += sample_fading(3.0, rng) <= 3.0;
    EXPECT_NEAR(static_cast<double>(below) / n, oracle_p33, 0.005);
}

TEST(Noise, ThermalFloorOverTheBandwidth) {
    ChannelParams p;
    p.noise_figure_db = 0.0;
    EXPECT_NEAR(normalized_noise(p), 8.648385336e-12, 1e-21);
}

TEST(Noise, ScalesWithFigureBandwidthAndPower) {
    ChannelParams p;
    p.noise_figure_db = 0.0;
    const double base = normalized_noise(p);
    p.noise_figure_db = 10.0;
    EXPECT_DOUBLE_EQ(normalized_noise(p), 10.0 * base);
    p.noise_figure_db = 0.0;
    p.tx_power = 2.0;
    EXPECT_DOUBLE_EQ(normalized_noise(p), base / 2.0);
    p.tx_power = 1.0;
    p.bandwidth *= 3.0;
    EXPECT_NEAR(normalized_noise(p), 3.0 * base, 1e-24);
}

TEST(ChannelParams, Violations) {
    ChannelParams p;
    EXPECT_TRUE(p.violations().empty());
    p.pathloss_exponent = 2.0;
    p.nakagami_m = 0.3;
    p.pathloss_intercept = 1.5;
    EXPECT_EQ(p.violations().size(), 3u);
}
