#include "ridematch/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "ridematch/stats.hpp"

namespace ridematch {

namespace {

std::size_t feature_index(const std::string& name) {
    const auto& names = feature_names();
    for (std::size_t d = 0; d < names.size(); ++d) {
        if (names[d] == name) return d;
    }
    throw std::invalid_argument("unknown feature name: " + name);
}

enum : std::uint64_t { kStreamTrace = 1, kStreamLabels = 2, kStreamPositions = 3 };

// Reflecting bounds keep the walks inside [lo, hi] without parking them
// exactly on the limit (an absorbing clamp builds point masses there,
// which degenerates downstream quantile boxes to zero width).
double reflect(double x, double lo, double hi) {
    if (hi <= lo) return lo;
    while (x < lo || x > hi) {
        if (x < lo) x = 2.0 * lo - x;
        if (x > hi) x = 2.0 * hi - x;
    }
    return x;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 over the combined value
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

RideTrace gen_trace(const DriverStyle& style, double duration_s, double rate_hz) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("gen_trace: duration must be > 0");
    if (!(rate_hz > 0.0)) throw std::invalid_argument("gen_trace: rate must be > 0");
    if (style.base_speed < 0.0 || style.speed_var < 0.0 || style.accel_scale < 0.0 ||
        style.jerk_scale < 0.0) {
        throw std::invalid_argument("gen_trace: style parameters must be nonnegative");
    }

    const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(duration_s * rate_hz)));
    const double dt = 1.0 / rate_hz;
    const double v_lo = std::max(0.0, style.base_speed - style.speed_var);
    const double v_hi = style.base_speed + style.speed_var;

    RideTrace trace;
    trace.sample_rate = rate_hz;
    trace.t.reserve(n);
    trace.speed.reserve(n);
    trace.accel.reserve(n);
    trace.jerk.reserve(n);

    std::mt19937_64 rng(style.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    double jerk = 0.0, accel = 0.0;
    double speed = std::clamp(style.base_speed, v_lo, v_hi);
    trace.t.push_back(0.0);
    trace.speed.push_back(speed);
    trace.accel.push_back(accel);
    trace.jerk.push_back(jerk);

    for (std::size_t k = 1; k < n; ++k) {
        jerk = reflect(jerk + unit(rng) * style.jerk_scale * 0.5, -style.jerk_scale,
                       style.jerk_scale);
        accel = reflect(accel + jerk * dt, -style.accel_scale, style.accel_scale);
        const double tentative = speed + accel * dt;
        const double bounded = reflect(tentative, v_lo, v_hi);
        // keep speed the exact discrete integral of the stored acceleration
        if (bounded != tentative) accel = (bounded - speed) / dt;
        speed = bounded;

        trace.t.push_back(static_cast<double>(k) * dt);
        trace.speed.push_back(speed);
        trace.accel.push_back(accel);
        trace.jerk.push_back(jerk);
    }
    return trace;
}

LabeledDataset gen_labels(const GroundTruthComfort& truth,
                          const std::vector<SegmentFeatures>& features, std::uint64_t seed) {
    if (!(truth.label_noise >= 0.0 && truth.label_noise < 0.5)) {
        throw std::invalid_argument("gen_labels: label_noise must be in [0, 0.5)");
    }
    LabeledDataset out;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution flip(truth.label_noise);
    for (const auto& f : features) {
        if (!truth.true_region.empty() && f.values.size() != truth.true_region.dimension) {
            throw std::invalid_argument("gen_labels: feature dimension does not match truth region");
        }
        SegmentFeatures row = f;
        const bool comfortable = truth.true_region.contains(row.values);
        row.label = comfortable ? kLabelCalm : kLabelRash;
        if (truth.label_noise > 0.0 && flip(rng)) row.label = 1 - row.label;
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<Point2> gen_positions(std::size_t count, double extent_x, double extent_y,
                                  std::uint64_t seed) {
    if (!(extent_x > 0.0 && extent_y > 0.0)) {
        throw std::invalid_argument("gen_positions: extents must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, extent_x), uy(0.0, extent_y);
    std::vector<Point2> out(count);
    for (auto& p : out) {
        p.x = ux(rng);
        p.y = uy(rng);
    }
    return out;
}

ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    cfg.seed = j.value("seed", 0ull);
    if (j.contains("map_extent")) {
        cfg.map_extent_x = j.at("map_extent").at(0).get<double>();
        cfg.map_extent_y = j.at("map_extent").at(1).get<double>();
    }
    if (j.contains("trace")) {
        const auto& t = j.at("trace");
        cfg.trace.sessions_per_driver = t.value("sessions_per_driver", 2);
        cfg.trace.duration_s = t.value("duration_s", 600.0);
        cfg.trace.rate_hz = t.value("rate_hz", 10.0);
        cfg.trace.window_s = t.value("window_s", 10.0);
    }
    for (const auto& d : j.at("drivers")) {
        DriverConfig dc;
        dc.id = d.at("id").get<std::string>();
        dc.style.base_speed = d.at("base_speed").get<double>();
        dc.style.speed_var = d.at("speed_var").get<double>();
        dc.style.accel_scale = d.at("accel_scale").get<double>();
        dc.style.jerk_scale = d.at("jerk_scale").get<double>();
        cfg.drivers.push_back(std::move(dc));
    }
    for (const auto& p : j.at("passengers")) {
        PassengerConfig pc;
        pc.id = p.at("id").get<std::string>();
        pc.epsilon = p.value("epsilon", 0.5);
        pc.label_noise = p.value("label_noise", 0.05);
        if (p.contains("comfort_caps")) {
            for (const auto& [name, q] : p.at("comfort_caps").items()) {
                pc.comfort_caps[name] = q.get<double>();
            }
        }
        if (p.contains("comfort_box")) {
            for (const auto& [name, lohi] : p.at("comfort_box").items()) {
                pc.comfort_box[name] = {lohi.at(0).get<double>(), lohi.at(1).get<double>()};
            }
        }
        cfg.passengers.push_back(std::move(pc));
    }

    if (cfg.drivers.empty()) throw std::invalid_argument("scenario config: needs at least one driver");
    if (cfg.passengers.empty()) {
        throw std::invalid_argument("scenario config: needs at least one passenger");
    }
    if (cfg.trace.sessions_per_driver < 1 || !(cfg.trace.duration_s > 0.0) ||
        !(cfg.trace.rate_hz > 0.0) || !(cfg.trace.window_s > 0.0)) {
        throw std::invalid_argument("scenario config: bad trace parameters");
    }
    for (const auto& pc : cfg.passengers) {
        if (!(pc.epsilon > 0.0 && pc.epsilon < 1.0)) {
            throw std::invalid_argument("scenario config: epsilon must be in (0,1) for " + pc.id);
        }
        if (!(pc.label_noise >= 0.0 && pc.label_noise < 0.5)) {
            throw std::invalid_argument("scenario config: label_noise must be in [0,0.5) for " +
                                        pc.id);
        }
        for (const auto& [name, q] : pc.comfort_caps) {
            feature_index(name);
            if (!(q > 0.0 && q < 1.0)) {
                throw std::invalid_argument("scenario config: cap quantile must be in (0,1) for " +
                                            name);
            }
        }
        for (const auto& [name, lohi] : pc.comfort_box) {
            feature_index(name);
            if (!(lohi.first <= lohi.second)) {
                throw std::invalid_argument("scenario config: empty comfort_box range for " + name);
            }
        }
    }
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario config: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return scenario_config_from_json(j);
}

GeneratedScenario generate_scenario(const ScenarioConfig& config) {
    GeneratedScenario out;

    for (std::size_t di = 0; di < config.drivers.size(); ++di) {
        GeneratedScenario::DriverData driver;
        driver.id = config.drivers[di].id;
        for (int s = 0; s < config.trace.sessions_per_driver; ++s) {
            DriverStyle style = config.drivers[di].style;
            style.seed = derive_seed(config.seed,
                                     (kStreamTrace << 32) | (di << 12) | static_cast<unsigned>(s));
            RideTrace trace = gen_trace(style, config.trace.duration_s, config.trace.rate_hz);
            for (const auto& range : segment(trace, config.trace.window_s)) {
                SegmentFeatures seg = extract_features(trace, range);
                seg.segment_index = static_cast<std::int64_t>(out.pooled.size());
                driver.segments.push_back(seg);
                out.pooled.push_back(std::move(seg));
            }
            driver.traces.push_back(std::move(trace));
        }
        out.drivers.push_back(std::move(driver));
    }
    if (out.pooled.empty()) {
        throw std::runtime_error("generate_scenario: traces too short to produce any segment");
    }

    // Domain: pooled per-dimension ranges with 5% padding (never zero width).
    std::vector<double> lo(kFeatureCount), hi(kFeatureCount);
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
        double mn = out.pooled.front().values[d], mx = mn;
        for (const auto& seg : out.pooled) {
            mn = std::min(mn, seg.values[d]);
            mx = std::max(mx, seg.values[d]);
        }
        const double pad = std::max(0.05 * (mx - mn), 1e-6);
        lo[d] = mn - pad;
        hi[d] = mx + pad;
    }
    out.domain = BoundingDomain(HyperRect(lo, hi));

    // Resolve per-passenger truth boxes against the pooled distribution.
    std::vector<std::vector<double>> sorted_columns(kFeatureCount);
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
        sorted_columns[d].reserve(out.pooled.size());
        for (const auto& seg : out.pooled) sorted_columns[d].push_back(seg.values[d]);
        std::sort(sorted_columns[d].begin(), sorted_columns[d].end());
    }

    for (std::size_t pi = 0; pi < config.passengers.size(); ++pi) {
        const auto& pc = config.passengers[pi];
        GeneratedScenario::PassengerData pd;
        pd.id = pc.id;
        pd.epsilon = pc.epsilon;

        std::vector<double> box_lo = out.domain.bounds.lo;
        std::vector<double> box_hi = out.domain.bounds.hi;
        for (const auto& [name, q] : pc.comfort_caps) {
            const std::size_t d = feature_index(name);
            box_hi[d] = stats::quantile_sorted(sorted_columns[d], q);
        }
        for (const auto& [name, lohi] : pc.comfort_box) {
            const std::size_t d = feature_index(name);
            box_lo[d] = lohi.first;
            box_hi[d] = lohi.second;
        }
        pd.truth.true_region =
            RegionUnion({HyperRect(std::move(box_lo), std::move(box_hi))}, kFeatureCount);
        pd.truth.label_noise = pc.label_noise;

        pd.labeled =
            gen_labels(pd.truth, out.pooled, derive_seed(config.seed, (kStreamLabels << 32) | pi));
        pd.labeled.passenger_id = pc.id;
        out.passengers.push_back(std::move(pd));
    }

    out.passenger_positions =
        gen_positions(config.passengers.size(), config.map_extent_x, config.map_extent_y,
                      derive_seed(config.seed, (kStreamPositions << 32) | 0));
    out.driver_positions =
        gen_positions(config.drivers.size(), config.map_extent_x, config.map_extent_y,
                      derive_seed(config.seed, (kStreamPositions << 32) | 1));
    return out;
}

}  // namespace ridematch
