#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ridematch {

inline constexpr int kLabelCalm = 0;
inline constexpr int kLabelRash = 1;
inline constexpr int kUnlabeled = -1;

inline constexpr std::size_t kSignalCount = 3;   // speed, accel, jerk
inline constexpr std::size_t kStatCount = 7;     // mean, median, std, min, max, p25, p75
inline constexpr std::size_t kFeatureCount = kSignalCount * kStatCount;  // 21

/// Canonical feature names, signal-major:
/// speed_mean .. speed_p75, accel_mean .. accel_p75, jerk_mean .. jerk_p75.
const std::array<std::string, kFeatureCount>& feature_names();

/// Raw driving time series sampled at a fixed rate.
struct RideTrace {
    std::vector<double> t;       // seconds, monotone increasing
    std::vector<double> speed;   // m/s
    std::vector<double> accel;   // m/s^2
    std::vector<double> jerk;    // m/s^3
    double sample_rate = 10.0;   // Hz

    std::size_t size() const { return speed.size(); }
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive

    std::size_t size() const { return end - begin; }
};

/// Per-segment statistical summary. The feature pipeline always produces
/// kFeatureCount values in canonical order; the vector form keeps the
/// downstream model code dimension-agnostic.
struct SegmentFeatures {
    std::vector<double> values;
    int label = kUnlabeled;
    std::int64_t segment_index = 0;
};

struct LabeledDataset {
    std::vector<SegmentFeatures> rows;
    std::string passenger_id;
};

/// Consecutive non-overlapping windows of window_seconds * sample_rate
/// samples. A trailing partial window is kept when it is at least half a
/// window long, dropped otherwise.
std::vector<IndexRange> segment(const RideTrace& trace, double window_seconds = 10.0);

/// 21 statistics over the given sample range: per signal block
/// (mean, median, std, min, max, p25, p75), population std, linearly
/// interpolated percentiles.
SegmentFeatures extract_features(const RideTrace& trace, const IndexRange& range);

/// Gaussian relabeling pass: fit per-class, per-feature normal densities
/// (sigma floored at 1e-9) with class priors from label counts, then move
/// every row to the class with the higher log posterior. Exact ties keep
/// the original label. Input is not modified.
LabeledDataset gnb_label_correction(const LabeledDataset& data);

/// Inverse-frequency class weights w_c = K / (2 * count_c).
std::pair<double, double> class_weights(const LabeledDataset& data);

/// Mean of interval-level labels.
double urgency_score(std::span<const int> labels);

}  // namespace ridematch
