#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numeric>

#include "mmhw/road.hpp"

using namespace mmhw;

namespace {

RoadConfig default_road() { return RoadConfig{}; }

}  // namespace

TEST(RoadConfig, DefaultScenario) {
    const auto road = default_road();
    EXPECT_NO_THROW(road.validate());
    EXPECT_EQ(road.num_lanes, 4);
    EXPECT_DOUBLE_EQ(road.road_length, 20000.0);
    EXPECT_GT(road.truck.length, road.car.length);
    EXPECT_EQ(road.heading(1), Heading::EastToWest);
    EXPECT_EQ(road.heading(2), Heading::EastToWest);
    EXPECT_EQ(road.heading(3), Heading::WestToEast);
    EXPECT_EQ(road.heading(4), Heading::WestToEast);
}

TEST(RoadConfig, CollectsEveryViolation) {
    RoadConfig road;
    road.num_lanes = 5;
    road.lane_width = -1.0;
    road.truck_fractions = {0.1, 2.0, 0.0, 0.0};
    const auto v = road.violations();
    EXPECT_GE(v.size(), 4u);
    EXPECT_THROW(road.validate(), InvalidConfig);
}

TEST(SampleLanePositions, RejectsBadArguments) {
    Rng rng(1);
    EXPECT_THROW(sample_lane_positions(0.0, 0.06, rng), InvalidConfig);
    EXPECT_THROW(sample_lane_positions(100.0, 0.0, rng), InvalidConfig);
    EXPECT_THROW(sample_lane_positions(100.0, -1.0, rng), InvalidConfig);
}

TEST(SampleLanePositions, SortedAndInRange) {
    Rng rng(7);
    const auto xs = sample_lane_positions(20000.0, 0.06, rng);
    EXPECT_TRUE(std::is_sorted(xs.begin(), xs.end()));
    for (double x : xs) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 20000.0);
    }
}

TEST(SampleLanePositions, VanishingIntensityGivesEmptyLane) {
    Rng rng(3);
    int empty = 0;
    for (int i = 0; i < 1000; ++i) empty += sample_lane_positions(20000.0, 1e-12, rng).empty();
    EXPECT_EQ(empty, 1000);
}

// Mean count over 20 km at 0.01/m is 200; 1e4 realizations put the mean
// within 1% and the variance (Poisson: equal to the mean) within 3 SE.
TEST(SampleLanePositions, PoissonMomentsAtLowDensity) {
    Rng rng(11);
    const int reps = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double n = static_cast<double>(sample_lane_positions(20000.0, 0.01, rng).size());
        sum += n;
        sum_sq += n * n;
    }
    const double mean = sum / reps;
    const double var = sum_sq / reps - mean * mean;
    EXPECT_NEAR(mean, 200.0, 2.0);
    EXPECT_NEAR(mean, 200.0, 3.0 * std::sqrt(200.0 / reps));
    // Var of the sample variance for Poisson(mu) ~ (mu + 2 mu^2) / n.
    EXPECT_NEAR(var, 200.0, 3.0 * std::sqrt((200.0 + 2.0 * 200.0 * 200.0) / reps));
}

TEST(SampleLanePositions, ExpectedCountAtSixtyPerKilometer) {
    Rng rng(5);
    const int reps = 400;
    double sum = 0.0;
    for (int i = 0; i < reps; ++i) sum += static_cast<double>(sample_lane_positions(20000.0, 6e-2, rng).size());
    EXPECT_NEAR(sum / reps, 1200.0, 3.0 * std::sqrt(1200.0 / reps));
}

TEST(MarkVehicles, LaneCountMismatchIsRejected) {
    Rng a(1), b(2), c(3);
    std::vector<std::vector<double>> positions(3);
    EXPECT_THROW(mark_vehicles(positions, default_road(), a, b, c, 0.5, 8), InvalidConfig);
}

TEST(MarkVehicles, LaneTwoCarDensity) {
    const auto road = default_road();
    EXPECT_NEAR((1.0 - road.truck_fractions[1]) * road.lane_intensities[1], 5.7e-2, 1e-15);
}

TEST(MarkVehicles, AllReceiversWhenPrxIsOne) {
    const auto snap = generate_snapshot(default_road(), 1.0, 8, 42);
    for (const auto& v : snap.vehicles) {
        if (v.is_car()) EXPECT_EQ(v.mode, Mode::RX);
        else EXPECT_EQ(v.mode, Mode::Inactive);
    }
}

TEST(MarkVehicles, TrucksCarryNoRadio) {
    const auto snap = generate_snapshot(default_road(), 0.5, 8, 9);
    int trucks = 0;
    for (const auto& v : snap.vehicles)
        if (v.is_truck()) {
            ++trucks;
            EXPECT_EQ(v.mode, Mode::Inactive);
        }
    EXPECT_GT(trucks, 0);
}

TEST(MarkVehicles, SectorFrequenciesAreUniform) {
    RoadConfig road;
    road.road_length = 200000.0;
    road.truck_fractions = {0.0, 0.0, 0.0, 0.0};
    road.lane_intensities = {0.125, 0.125, 0.125, 0.125};  // ~1e5 cars
    const auto snap = generate_snapshot(road, 0.5, 8, 77);
    std::array<double, 8> counts{};
    for (const auto& v : snap.vehicles) counts[static_cast<std::size_t>(v.sector)] += 1.0;
    const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
    ASSERT_GT(n, 9e4);
    double chi2 = 0.0;
    for (double c : counts) {
        EXPECT_NEAR(c / n, 1.0 / 8, 0.01);
        chi2 += (c - n / 8) * (c - n / 8) / (n / 8);
    }
    EXPECT_LT(chi2, 18.475);  // chi-square, 7 dof, alpha = 0.01
}

TEST(MarkVehicles, TruckFractionConverges) {
    const auto road = default_road();
    std::array<double, 4> trucks{}, total{};
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto snap = generate_snapshot(road, 0.5, 8, s);
        for (const auto& v : snap.vehicles) {
            total[static_cast<std::size_t>(v.lane - 1)] += 1.0;
            trucks[static_cast<std::size_t>(v.lane - 1)] += v.is_truck();
        }
    }
    for (std::size_t l = 0; l < 4; ++l) {
        const double eps = road.truck_fractions[l];
        const double se = std::sqrt(eps * (1 - eps) / total[l]);
        // The hard-core correction drops a handful of vehicles; allow for that.
        EXPECT_NEAR(trucks[l] / total[l], eps, 3.0 * se + 2e-3) << "lane " << l + 1;
    }
}

// Modes and sectors must not depend on where a car sits. Split cars by the
// parity of their 100 m road block and compare RX fractions.
TEST(MarkVehicles, MarksIndependentOfPosition) {
    const auto snap = generate_snapshot(default_road(), 0.5, 4, 1234);
    double rx[2] = {0, 0}, n[2] = {0, 0};
    double sec0[2] = {0, 0};
    for (const auto& v : snap.vehicles) {
        if (!v.is_car()) continue;
        const int half = static_cast<int>(v.position / 100.0) % 2;
        n[half] += 1;
        rx[half] += v.mode == Mode::RX;
        sec0[half] += v.sector == 0;
    }
    // 2x2 chi-square on RX counts, 1 dof, alpha = 0.01.
    auto chi2 = [&](const double* hits) {
        const double p = (hits[0] + hits[1]) / (n[0] + n[1]);
        double s = 0.0;
        for (int h = 0; h < 2; ++h) {
            const double e1 = n[h] * p, e0 = n[h] * (1 - p);
            s += (hits[h] - e1) * (hits[h] - e1) / e1 + (n[h] - hits[h] - e0) * (n[h] - hits[h] - e0) / e0;
        }
        return s;
    };
    EXPECT_LT(chi2(rx), 6.635);
    EXPECT_LT(chi2(sec0), 6.635);
}

TEST(Footprint, TruckInLaneTwo) {
    const auto road = default_road();
    Vehicle truck;
    truck.kind = VehicleKind::Truck;
    truck.lane = 2;
    truck.position = 100.0;
    const Rect r = footprint(truck, road);
    EXPECT_NEAR(road.lane_center(2), 5.55, 1e-12);
    EXPECT_NEAR(r.x_min, 94.4, 1e-12);
    EXPECT_NEAR(r.x_max, 105.6, 1e-12);
    EXPECT_NEAR(r.y_min, 4.29, 1e-12);
    EXPECT_NEAR(r.y_max, 6.81, 1e-12);
}

TEST(Footprint, CarAtOrigin) {
    Vehicle car;
    car.lane = 1;
    const Rect r = footprint(car, default_road());
    EXPECT_DOUBLE_EQ(r.x_min, -2.0);
    EXPECT_DOUBLE_EQ(r.x_max, 2.0);
}

TEST(Footprint, CarsFourMetersApartTouch) {
    const auto road = default_road();
    Vehicle a, b;
    a.lane = b.lane = 3;
    a.position = 50.0;
    b.position = 54.0;
    EXPECT_DOUBLE_EQ(footprint(a, road).x_max, footprint(b, road).x_min);
    Snapshot snap;
    snap.road = road;
    snap.vehicles = {a, b};
    snap.vehicles[1].id = 1;
    EXPECT_DOUBLE_EQ(worst_overlap(snap), 0.0);
}

TEST(HardCore, NoOverlapInAnySnapshot) {
    auto road = default_road();
    road.lane_intensities = {0.1, 0.1, 0.1, 0.1};  // dense, so corrections actually happen
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto snap = generate_snapshot(road, 0.5, 8, s);
        ASSERT_EQ(worst_overlap(snap), 0.0) << "seed " << s;
        for (int lane = 1; lane <= 4; ++lane) {
            const auto vs = snap.lane(lane);
            for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
                const double gap = vs[i + 1].position - vs[i].position -
                                   (road.dims(vs[i].kind).length + road.dims(vs[i + 1].kind).length) / 2;
                ASSERT_GE(gap, road.min_gap - 1e-9);
            }
        }
    }
}

TEST(HardCore, PushesAndDropsAcrossTheSeam) {
    RoadConfig road;
    road.road_length = 30.0;
    std::vector<std::pair<double, VehicleKind>> lane{
        {1.0, VehicleKind::Car}, {2.0, VehicleKind::Car}, {20.0, VehicleKind::Truck}, {28.0, VehicleKind::Car}};
    resolve_overlaps(lane, road);
    ASSERT_EQ(lane.size(), 3u);
    EXPECT_DOUBLE_EQ(lane[0].first, 1.0);
    EXPECT_DOUBLE_EQ(lane[1].first, 6.0);   // 1 + 4 + 1
    EXPECT_DOUBLE_EQ(lane[2].first, 20.0);
}

TEST(TaggedReceiver, NearestRxCarToMidpoint) {
    Snapshot snap;
    snap.road = default_road();
    auto car = [](std::uint32_t id, int lane, double x, Mode mode) {
        Vehicle v;
        v.id = id;
        v.lane = lane;
        v.position = x;
        v.mode = mode;
        return v;
    };
    snap.vehicles = {car(0, 1, 10000.0, Mode::RX), car(1, 2, 9000.0, Mode::RX), car(2, 2, 9990.0, Mode::TX),
                     car(3, 2, 10500.0, Mode::RX)};
    const auto idx = tagged_receiver(snap, 2);
    ASSERT_TRUE(idx.has_value());
    EXPECT_EQ(snap.vehicles[*idx].id, 3u);
    EXPECT_FALSE(tagged_receiver(snap, 4).has_value());
}

TEST(RingDelta, ShorterArc) {
    EXPECT_DOUBLE_EQ(ring_delta(10.0, 30.0, 100.0), 20.0);
    EXPECT_DOUBLE_EQ(ring_delta(10.0, 90.0, 100.0), -20.0);
    EXPECT_DOUBLE_EQ(ring_delta(90.0, 10.0, 100.0), 20.0);
    EXPECT_DOUBLE_EQ(wrap_position(-1.0, 100.0), 99.0);
    EXPECT_DOUBLE_EQ(wrap_position(101.0, 100.0), 1.0);
}

TEST(Snapshot, DeterministicForSeed) {
    const auto a = generate_snapshot(default_road(), 0.5, 8, 99);
    const auto b = generate_snapshot(default_road(), 0.5, 8, 99);
    ASSERT_EQ(a.vehicles.size(), b.vehicles.size());
    for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
        EXPECT_EQ(a.vehicles[i].position, b.vehicles[i].position);
        EXPECT_EQ(a.vehicles[i].sector, b.vehicles[i].sector);
    }
}
