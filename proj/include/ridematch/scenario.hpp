#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ridematch/features.hpp"
#include "ridematch/geometry.hpp"
#include "ridematch/matching.hpp"

namespace ridematch {

/// Kinematic parameters of one synthetic driver. Identical (style, seed)
/// always reproduces the identical trace.
struct DriverStyle {
    double base_speed = 10.0;  // m/s
    double speed_var = 3.0;    // speed stays in [max(0, base - var), base + var]
    double accel_scale = 1.0;  // |accel| bound, m/s^2
    double jerk_scale = 0.5;   // |jerk| bound, m/s^3
    std::uint64_t seed = 0;
};

/// Known comfort ground truth for a synthetic passenger, in feature space.
struct GroundTruthComfort {
    RegionUnion true_region;
    double label_noise = 0.0;  // independent flip probability, in [0, 0.5)
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Bounded-jerk kinematics: jerk is a seeded bounded random walk
/// (reflecting at +-jerk_scale), acceleration its integral bounded to
/// +-accel_scale, speed the nonnegative integral bounded around
/// base_speed. When the speed bound engages, the stored acceleration
/// sample is adjusted so speed stays the exact discrete integral of
/// acceleration.
RideTrace gen_trace(const DriverStyle& style, double duration_s, double rate_hz = 10.0);

/// Label 0 iff the feature vector lies in the true region, then flip each
/// label independently with probability label_noise.
LabeledDataset gen_labels(const GroundTruthComfort& truth,
                          const std::vector<SegmentFeatures>& features, std::uint64_t seed);

std::vector<Point2> gen_positions(std::size_t count, double extent_x, double extent_y,
                                  std::uint64_t seed);

struct TraceConfig {
    int sessions_per_driver = 2;
    double duration_s = 600.0;
    double rate_hz = 10.0;
    double window_s = 10.0;
};

struct DriverConfig {
    std::string id;
    DriverStyle style;  // seed resolved per (driver, session) at generation time
};

struct PassengerConfig {
    std::string id;
    double epsilon = 0.5;
    double label_noise = 0.05;
    // comfort_caps: feature -> quantile q; the passenger is comfortable
    // when the feature is at most the empirical q-quantile of the pooled
    // segments. comfort_box: absolute per-feature [lo, hi] overrides.
    std::map<std::string, double> comfort_caps;
    std::map<std::string, std::pair<double, double>> comfort_box;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    double map_extent_x = 10.0;
    double map_extent_y = 10.0;
    TraceConfig trace;
    std::vector<DriverConfig> drivers;
    std::vector<PassengerConfig> passengers;
};

ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct GeneratedScenario {
    struct DriverData {
        std::string id;
        std::vector<RideTrace> traces;           // one per session
        std::vector<SegmentFeatures> segments;   // this driver's segments
    };
    struct PassengerData {
        std::string id;
        double epsilon = 0.5;
        GroundTruthComfort truth;
        LabeledDataset labeled;  // labels over the pooled segments
    };

    std::vector<DriverData> drivers;
    std::vector<PassengerData> passengers;
    std::vector<SegmentFeatures> pooled;  // all segments, driver-major order
    BoundingDomain domain;                // pooled feature ranges, padded
    std::vector<Point2> passenger_positions;
    std::vector<Point2> driver_positions;
};

/// Run the full synthetic pipeline: traces through the real segmentation
/// and feature extraction, pooled-feature domain, truth resolution,
/// labels, positions. Deterministic in the config.
GeneratedScenario generate_scenario(const ScenarioConfig& config);

}  // namespace ridematch
