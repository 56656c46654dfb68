#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mmhw/antenna.hpp"
#include "mmhw/channel.hpp"
#include "mmhw/error.hpp"
#include "mmhw/mac.hpp"
#include "mmhw/mobility.hpp"
#include "mmhw/road.hpp"

namespace mmhw {

using json = nlohmann::ordered_json;

enum class MobilityMode { Off, Trace, Redraw };

inline const char* to_string(MobilityMode m) {
    switch (m) {
        case MobilityMode::Off: return "off";
        case MobilityMode::Trace: return "trace";
        case MobilityMode::Redraw: return "redraw";
    }
    return "off";
}

/// `trace`: a few long Krauss runs are sampled every `trace_interval`
/// seconds after warmup, with per-slot marks re-drawn at each sample.
/// `redraw`: every snapshot is a fresh placement warmed up on its own.
struct MobilityConfig {
    MobilityMode mode = MobilityMode::Trace;
    KraussParams krauss;
    double trace_interval = 5.0;
    int trace_chains = 8;
};

struct AntennaSettings {
    double beamwidth_deg = 45.0;
    std::optional<double> sidelobe_rel_db = -20.0;  // nullopt: zero sidelobe
    double reference_deg = 0.0;

    AntennaConfig build(double psi_deg) const { return make_antenna(psi_deg, sidelobe_rel_db, reference_deg); }
    AntennaConfig build() const { return build(beamwidth_deg); }
};

struct MetricsConfig {
    std::vector<double> theta_db;    // SINR thresholds
    std::vector<double> kappa_gbps;  // rate thresholds
    bool subslot_rate_scaling = false;
    bool empty_cluster_as_outage = false;

    std::vector<double> theta_linear() const {
        std::vector<double> out;
        for (double db : theta_db) out.push_back(std::pow(10.0, db / 10.0));
        return out;
    }

    std::vector<double> kappa_bps() const {
        std::vector<double> out;
        for (double g : kappa_gbps) out.push_back(g * 1e9);
        return out;
    }
};

/// Values swept over; an empty list keeps the base scenario value. A swept
/// lambda applies to every lane.
struct SweepSpec {
    std::vector<double> lambdas;
    std::vector<double> psi_deg;
    std::vector<std::vector<double>> truck_fractions;
};

struct ScenarioConfig {
    RoadConfig road;
    int receiver_lane = 2;
    MobilityConfig mobility;
    ChannelParams channel;
    json pathloss_intercept_spec = "fspl@1m";
    AntennaSettings antenna;
    MacConfig mac;
    bool cars_block = false;
    MetricsConfig metrics;
    SweepSpec sweep;
    std::uint64_t num_snapshots = 5000;
    std::uint64_t master_seed = 1;
    int workers = 1;
};

inline std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> out;
    if (points == 1) return {lo};
    for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / (points - 1));
    return out;
}

/// 41 thresholds from -10 dB to 30 dB in 1 dB steps.
inline std::vector<double> default_theta_db() { return linspace(-10.0, 30.0, 41); }

/// 47 thresholds from 0.5 to 12 Gb/s in 0.25 Gb/s steps.
inline std::vector<double> default_kappa_gbps() { return linspace(0.5, 12.0, 47); }

inline ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.metrics.theta_db = default_theta_db();
    cfg.metrics.kappa_gbps = default_kappa_gbps();
    return cfg;
}

namespace detail {

/// Strict reader over one JSON object: records type errors and unknown keys
/// into a shared list instead of throwing on the first problem.
class SectionReader {
public:
    SectionReader(const json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_.is_object()) errors_.push_back(path_ + " must be an object");
    }

    ~SectionReader() {
        if (!obj_.is_object()) return;
        for (const auto& [key, _] : obj_.items())
            if (!seen_.count(key)) errors_.push_back("unknown key " + qualified(key));
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.is_object() && obj_.contains(key);
    }

    const json* raw(const std::string& key) { return has(key) ? &obj_.at(key) : nullptr; }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception&) {
            errors_.push_back(qualified(key) + " has the wrong type");
        }
    }

    template <typename T>
    void read_required(const std::string& key, T& out) {
        if (!has(key)) {
            errors_.push_back("missing required field " + qualified(key));
            return;
        }
        read(key, out);
    }

    std::string qualified(const std::string& key) const { return path_ + "." + key; }

private:
    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

inline std::optional<double> resolve_intercept(const json& spec, double carrier, std::vector<std::string>& errors) {
    if (spec.is_number()) return spec.get<double>();
    if (spec.is_string() && spec.get<std::string>() == "fspl@1m") return free_space_intercept(carrier);
    if (spec.is_object() && spec.size() == 1 && spec.contains("db") && spec.at("db").is_number())
        return db_to_linear(spec.at("db").get<double>());
    errors.emplace_back("channel.pathloss_intercept must be a linear number, {\"db\": x} or \"fspl@1m\"");
    return std::nullopt;
}

inline std::vector<double> read_grid(const json* raw, const std::string& name, std::vector<double> fallback,
                                     std::vector<std::string>& errors) {
    if (!raw) return fallback;
    std::vector<double> values;
    if (raw->is_array()) {
        for (const auto& v : *raw) {
            if (!v.is_number()) {
                errors.push_back(name + " entries must be numbers");
                return fallback;
            }
            values.push_back(v.get<double>());
        }
    } else if (raw->is_object()) {
        std::vector<std::string> local;
        double lo = 0, hi = 0;
        int points = 0;
        {
            SectionReader r(*raw, name, local);
            r.read_required("min", lo);
            r.read_required("max", hi);
            r.read_required("points", points);
        }
        errors.insert(errors.end(), local.begin(), local.end());
        if (!local.empty()) return fallback;
        if (points < 1 || hi < lo) {
            errors.push_back(name + " needs points >= 1 and max >= min");
            return fallback;
        }
        values = linspace(lo, hi, points);
    } else {
        errors.push_back(name + " must be a list or a {min, max, points} range");
        return fallback;
    }
    if (values.empty()) errors.push_back(name + " must not be empty");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1])) {
            errors.push_back(name + " must be strictly increasing");
            break;
        }
    return values;
}

}  // namespace detail

/// Every invariant violation of an assembled scenario.
inline std::vector<std::string> scenario_violations(const ScenarioConfig& cfg) {
    std::vector<std::string> out = cfg.road.violations();
    auto append = [&](std::vector<std::string> more) { out.insert(out.end(), more.begin(), more.end()); };
    append(cfg.mobility.krauss.violations());
    append(cfg.channel.violations());
    append(cfg.mac.violations());
    if (cfg.receiver_lane < 1 || cfg.receiver_lane > cfg.road.num_lanes)
        out.emplace_back("road.receiver_lane must name an existing lane");
    if (!(cfg.mobility.trace_interval > 0.0)) out.emplace_back("mobility.trace_interval_s must be > 0");
    if (cfg.mobility.trace_chains < 1) out.emplace_back("mobility.trace_chains must be >= 1");
    if (cfg.num_snapshots < 1) out.emplace_back("run.num_snapshots must be >= 1");
    if (cfg.workers < 1) out.emplace_back("run.workers must be >= 1");
    if (cfg.metrics.theta_db.empty()) out.emplace_back("metrics.theta_db must not be empty");
    if (cfg.metrics.kappa_gbps.empty()) out.emplace_back("metrics.kappa_gbps must not be empty");
    if (!std::is_sorted(cfg.metrics.theta_db.begin(), cfg.metrics.theta_db.end()) ||
        !std::is_sorted(cfg.metrics.kappa_gbps.begin(), cfg.metrics.kappa_gbps.end()))
        out.emplace_back("metric grids must be increasing");

    auto check_psi = [&](double psi, const std::string& where) {
        if (!sectors_for_beamwidth(psi))
            out.push_back(where + " = " + std::to_string(psi) + " deg does not divide 360 deg");
    };
    check_psi(cfg.antenna.beamwidth_deg, "antenna.beamwidth_deg");
    for (double psi : cfg.sweep.psi_deg) check_psi(psi, "sweep.psi_deg entry");
    if (cfg.antenna.sidelobe_rel_db && *cfg.antenna.sidelobe_rel_db > 0.0)
        out.emplace_back("antenna.sidelobe_rel_db must be <= 0");
    for (double l : cfg.sweep.lambdas)
        if (!(l > 0.0)) out.emplace_back("sweep.lambda entries must be > 0");
    for (const auto& eps : cfg.sweep.truck_fractions) {
        if (static_cast<int>(eps.size()) != cfg.road.num_lanes)
            out.emplace_back("sweep.truck_fractions entries must have num_lanes values");
        for (double e : eps)
            if (!(e >= 0.0 && e <= 1.0)) out.emplace_back("sweep.truck_fractions values must lie in [0, 1]");
    }
    return out;
}

/// Parses and checks a scenario. Throws InvalidConfig listing every problem.
inline ScenarioConfig validate_config(std::string_view text) {
    std::vector<std::string> errors;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidConfig("config must be a JSON object");

    ScenarioConfig cfg = default_scenario();
    const json empty = json::object();
    auto section = [&](const char* name) -> const json& {
        return doc.contains(name) ? doc.at(name) : empty;
    };
    {
        detail::SectionReader top(doc, "config", errors);
        for (const char* name : {"road", "mobility", "channel", "antenna", "mac", "blockage", "metrics", "sweep", "run"})
            top.has(name);
    }
    {
        detail::SectionReader r(section("road"), "road", errors);
        r.read("length_m", cfg.road.road_length);
        r.read("num_lanes", cfg.road.num_lanes);
        r.read("lane_width_m", cfg.road.lane_width);
        r.read_required("lane_intensities_per_m", cfg.road.lane_intensities);
        r.read_required("truck_fractions", cfg.road.truck_fractions);
        r.read("car_length_m", cfg.road.car.length);
        r.read("car_width_m", cfg.road.car.width);
        r.read("truck_length_m", cfg.road.truck.length);
        r.read("truck_width_m", cfg.road.truck.width);
        r.read("min_gap_m", cfg.road.min_gap);
        r.read("receiver_lane", cfg.receiver_lane);
    }
    {
        detail::SectionReader r(section("mobility"), "mobility", errors);
        std::string mode = to_string(cfg.mobility.mode);
        r.read("mode", mode);
        if (mode == "off") cfg.mobility.mode = MobilityMode::Off;
        else if (mode == "trace") cfg.mobility.mode = MobilityMode::Trace;
        else if (mode == "redraw") cfg.mobility.mode = MobilityMode::Redraw;
        else errors.push_back("mobility.mode must be one of off, trace, redraw");
        auto& k = cfg.mobility.krauss;
        double car_kmh = k.max_speed_car * 3.6, truck_kmh = k.max_speed_truck * 3.6;
        r.read("max_speed_car_kmh", car_kmh);
        r.read("max_speed_truck_kmh", truck_kmh);
        k.max_speed_car = kmh_to_ms(car_kmh);
        k.max_speed_truck = kmh_to_ms(truck_kmh);
        r.read("max_accel", k.max_accel);
        r.read("max_decel", k.max_decel);
        r.read("driver_imperfection", k.driver_imperfection);
        r.read("reaction_time_s", k.reaction_time);
        r.read("time_step_s", k.time_step);
        r.read("warmup_s", k.warmup_duration);
        r.read("trace_interval_s", cfg.mobility.trace_interval);
        r.read("trace_chains", cfg.mobility.trace_chains);
    }
    {
        detail::SectionReader r(section("channel"), "channel", errors);
        auto& c = cfg.channel;
        r.read("carrier_frequency_hz", c.carrier_frequency);
        r.read("bandwidth_hz", c.bandwidth);
        if (const json* spec = r.raw("pathloss_intercept")) cfg.pathloss_intercept_spec = *spec;
        r.read("pathloss_exponent", c.pathloss_exponent);
        r.read("nakagami_m", c.nakagami_m);
        r.read("tx_power_w", c.tx_power);
        r.read("noise_figure_db", c.noise_figure_db);
        r.read("normalize_fading_power", c.normalize_fading_power);
        if (c.carrier_frequency > 0.0)
            if (auto v = detail::resolve_intercept(cfg.pathloss_intercept_spec, c.carrier_frequency, errors))
                c.pathloss_intercept = *v;
    }
    {
        detail::SectionReader r(section("antenna"), "antenna", errors);
        r.read("beamwidth_deg", cfg.antenna.beamwidth_deg);
        bool zero_sidelobe = false;
        r.read("zero_sidelobe", zero_sidelobe);
        double rel = cfg.antenna.sidelobe_rel_db.value_or(-20.0);
        r.read("sidelobe_rel_db", rel);
        cfg.antenna.sidelobe_rel_db = zero_sidelobe ? std::nullopt : std::optional<double>(rel);
        r.read("reference_deg", cfg.antenna.reference_deg);
    }
    {
        detail::SectionReader r(section("mac"), "mac", errors);
        r.read("slot_duration_s", cfg.mac.slot_duration);
        r.read("num_subslots", cfg.mac.num_subslots);
        r.read("coverage_range_m", cfg.mac.coverage_range);
        if (const json* t = r.raw("detection_threshold")) {
            if (t->is_number()) cfg.mac.detection_threshold = t->get<double>();
            else if (!t->is_null()) errors.emplace_back("mac.detection_threshold must be a number or null");
        }
        r.read("fading_in_detection", cfg.mac.fading_in_detection);
        r.read("p_rx", cfg.mac.p_rx);
    }
    {
        detail::SectionReader r(section("blockage"), "blockage", errors);
        r.read("cars_block", cfg.cars_block);
    }
    {
        detail::SectionReader r(section("metrics"), "metrics", errors);
        cfg.metrics.theta_db = detail::read_grid(r.raw("theta_db"), "metrics.theta_db", cfg.metrics.theta_db, errors);
        cfg.metrics.kappa_gbps =
            detail::read_grid(r.raw("kappa_gbps"), "metrics.kappa_gbps", cfg.metrics.kappa_gbps, errors);
        r.read("subslot_rate_scaling", cfg.metrics.subslot_rate_scaling);
        r.read("empty_cluster_as_outage", cfg.metrics.empty_cluster_as_outage);
    }
    {
        detail::SectionReader r(section("sweep"), "sweep", errors);
        r.read("lambda", cfg.sweep.lambdas);
        r.read("psi_deg", cfg.sweep.psi_deg);
        r.read("truck_fractions", cfg.sweep.truck_fractions);
    }
    {
        detail::SectionReader r(section("run"), "run", errors);
        r.read("num_snapshots", cfg.num_snapshots);
        r.read("master_seed", cfg.master_seed);
        r.read("workers", cfg.workers);
    }

    auto more = scenario_violations(cfg);
    errors.insert(errors.end(), more.begin(), more.end());
    if (!errors.empty()) throw InvalidConfig(std::move(errors));
    return cfg;
}

/// Canonical machine form of a scenario, every default filled in. Parsing
/// the result with validate_config reproduces the same scenario.
inline json to_json(const ScenarioConfig& cfg) {
    const auto& k = cfg.mobility.krauss;
    json antenna = {{"beamwidth_deg", cfg.antenna.beamwidth_deg},
                    {"zero_sidelobe", !cfg.antenna.sidelobe_rel_db.has_value()},
                    {"sidelobe_rel_db", cfg.antenna.sidelobe_rel_db.value_or(-20.0)},
                    {"reference_deg", cfg.antenna.reference_deg}};
    return json{
        {"road",
         {{"length_m", cfg.road.road_length},
          {"num_lanes", cfg.road.num_lanes},
          {"lane_width_m", cfg.road.lane_width},
          {"lane_intensities_per_m", cfg.road.lane_intensities},
          {"truck_fractions", cfg.road.truck_fractions},
          {"car_length_m", cfg.road.car.length},
          {"car_width_m", cfg.road.car.width},
          {"truck_length_m", cfg.road.truck.length},
          {"truck_width_m", cfg.road.truck.width},
          {"min_gap_m", cfg.road.min_gap},
          {"receiver_lane", cfg.receiver_lane}}},
        {"mobility",
         {{"mode", to_string(cfg.mobility.mode)},
          {"max_speed_car_kmh", k.max_speed_car * 3.6},
          {"max_speed_truck_kmh", k.max_speed_truck * 3.6},
          {"max_accel", k.max_accel},
          {"max_decel", k.max_decel},
          {"driver_imperfection", k.driver_imperfection},
          {"reaction_time_s", k.reaction_time},
          {"time_step_s", k.time_step},
          {"warmup_s", k.warmup_duration},
          {"trace_interval_s", cfg.mobility.trace_interval},
          {"trace_chains", cfg.mobility.trace_chains}}},
        {"channel",
         {{"carrier_frequency_hz", cfg.channel.carrier_frequency},
          {"bandwidth_hz", cfg.channel.bandwidth},
          {"pathloss_intercept", cfg.pathloss_intercept_spec},
          {"pathloss_exponent", cfg.channel.pathloss_exponent},
          {"nakagami_m", cfg.channel.nakagami_m},
          {"tx_power_w", cfg.channel.tx_power},
          {"noise_figure_db", cfg.channel.noise_figure_db},
          {"normalize_fading_power", cfg.channel.normalize_fading_power}}},
        {"antenna", antenna},
        {"mac",
         {{"slot_duration_s", cfg.mac.slot_duration},
          {"num_subslots", cfg.mac.num_subslots},
          {"coverage_range_m", cfg.mac.coverage_range},
          {"detection_threshold", cfg.mac.detection_threshold ? json(*cfg.mac.detection_threshold) : json(nullptr)},
          {"fading_in_detection", cfg.mac.fading_in_detection},
          {"p_rx", cfg.mac.p_rx}}},
        {"blockage", {{"cars_block", cfg.cars_block}}},
        {"metrics",
         {{"theta_db", cfg.metrics.theta_db},
          {"kappa_gbps", cfg.metrics.kappa_gbps},
          {"subslot_rate_scaling", cfg.metrics.subslot_rate_scaling},
          {"empty_cluster_as_outage", cfg.metrics.empty_cluster_as_outage}}},
        {"sweep",
         {{"lambda", cfg.sweep.lambdas},
          {"psi_deg", cfg.sweep.psi_deg},
          {"truck_fractions", cfg.sweep.truck_fractions}}},
        {"run",
         {{"num_snapshots", cfg.num_snapshots}, {"master_seed", cfg.master_seed}, {"workers", cfg.workers}}}};
}

/// FNV-1a over the canonical JSON text.
inline std::uint64_t config_hash(const ScenarioConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json(cfg).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace mmhw
