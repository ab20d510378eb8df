#include "ridematch/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ridematch/stats.hpp"

namespace ridematch {

namespace {

constexpr double kSigmaFloor = 1e-9;

struct ClassStats {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::size_t count = 0;
};

ClassStats fit_class(const LabeledDataset& data, int cls, std::size_t n_features) {
    ClassStats cs;
    cs.mu.assign(n_features, 0.0);
    cs.sigma.assign(n_features, 0.0);
    for (const auto& row : data.rows) {
        if (row.label != cls) continue;
        ++cs.count;
        for (std::size_t d = 0; d < n_features; ++d) cs.mu[d] += row.values[d];
    }
    for (std::size_t d = 0; d < n_features; ++d) cs.mu[d] /= static_cast<double>(cs.count);
    for (const auto& row : data.rows) {
        if (row.label != cls) continue;
        for (std::size_t d = 0; d < n_features; ++d) {
            const double diff = row.values[d] - cs.mu[d];
            cs.sigma[d] += diff * diff;
        }
    }
    for (std::size_t d = 0; d < n_features; ++d) {
        cs.sigma[d] = std::max(kSigmaFloor, std::sqrt(cs.sigma[d] / static_cast<double>(cs.count)));
    }
    return cs;
}

double log_likelihood(const ClassStats& cs, std::span<const double> x) {
    static const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::acos(-1.0));
    double ll = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double z = (x[d] - cs.mu[d]) / cs.sigma[d];
        ll += -kLogSqrt2Pi - std::log(cs.sigma[d]) - 0.5 * z * z;
    }
    return ll;
}

}  // namespace

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = [] {
        const std::array<std::string, kSignalCount> signals = {"speed", "accel", "jerk"};
        const std::array<std::string, kStatCount> stats = {"mean", "median", "std",
                                                           "min",  "max",    "p25", "p75"};
        std::array<std::string, kFeatureCount> out;
        std::size_t k = 0;
        for (const auto& sig : signals) {
            for (const auto& st : stats) out[k++] = sig + "_" + st;
        }
        return out;
    }();
    return names;
}

std::vector<IndexRange> segment(const RideTrace& trace, double window_seconds) {
    if (!(window_seconds > 0.0)) throw std::invalid_argument("segment: window_seconds must be > 0");
    if (!(trace.sample_rate > 0.0)) throw std::invalid_argument("segment: sample_rate must be > 0");
    if (trace.speed.size() != trace.accel.size() || trace.speed.size() != trace.jerk.size() ||
        trace.speed.size() != trace.t.size()) {
        throw std::invalid_argument("segment: trace series must have equal length");
    }

    const std::size_t n = trace.size();
    std::vector<IndexRange> ranges;
    if (n == 0) return ranges;

    const auto window = static_cast<std::size_t>(std::llround(window_seconds * trace.sample_rate));
    if (window == 0) throw std::invalid_argument("segment: window shorter than one sample");

    std::size_t pos = 0;
    while (pos + window <= n) {
        ranges.push_back({pos, pos + window});
        pos += window;
    }
    const std::size_t tail = n - pos;
    if (tail > 0 && 2 * tail >= window) {
        ranges.push_back({pos, n});
    }
    return ranges;
}

SegmentFeatures extract_features(const RideTrace& trace, const IndexRange& range) {
    if (range.begin >= range.end) throw std::invalid_argument("extract_features: empty range");
    if (range.end > trace.size()) throw std::invalid_argument("extract_features: range out of bounds");

    SegmentFeatures out;
    out.values.reserve(kFeatureCount);

    const std::array<const std::vector<double>*, kSignalCount> signals = {&trace.speed, &trace.accel,
                                                                          &trace.jerk};
    for (const auto* sig : signals) {
        std::vector<double> window(sig->begin() + static_cast<std::ptrdiff_t>(range.begin),
                                   sig->begin() + static_cast<std::ptrdiff_t>(range.end));
        std::vector<double> sorted = window;
        std::sort(sorted.begin(), sorted.end());

        out.values.push_back(stats::mean(window));
        out.values.push_back(stats::quantile_sorted(sorted, 0.5));
        out.values.push_back(stats::population_std(window));
        out.values.push_back(sorted.front());
        out.values.push_back(sorted.back());
        out.values.push_back(stats::quantile_sorted(sorted, 0.25));
        out.values.push_back(stats::quantile_sorted(sorted, 0.75));
    }

    for (double v : out.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("extract_features: non-finite statistic");
    }
    return out;
}

LabeledDataset gnb_label_correction(const LabeledDataset& data) {
    if (data.rows.empty()) throw std::invalid_argument("gnb_label_correction: empty dataset");
    const std::size_t n_features = data.rows.front().values.size();
    for (const auto& row : data.rows) {
        if (row.values.size() != n_features) {
            throw std::invalid_argument("gnb_label_correction: non-uniform feature count");
        }
    }

    const ClassStats c0 = fit_class(data, kLabelCalm, n_features);
    const ClassStats c1 = fit_class(data, kLabelRash, n_features);
    if (c0.count == 0 || c1.count == 0) {
        throw std::invalid_argument("gnb_label_correction: both classes must be present");
    }

    const double total = static_cast<double>(c0.count + c1.count);
    const double log_prior0 = std::log(static_cast<double>(c0.count) / total);
    const double log_prior1 = std::log(static_cast<double>(c1.count) / total);

    LabeledDataset out = data;
    for (auto& row : out.rows) {
        const double p0 = log_prior0 + log_likelihood(c0, row.values);
        const double p1 = log_prior1 + log_likelihood(c1, row.values);
        if (p0 > p1) {
            row.label = kLabelCalm;
        } else if (p1 > p0) {
            row.label = kLabelRash;
        }
        // tie: keep the original label
    }
    return out;
}

std::pair<double, double> class_weights(const LabeledDataset& data) {
    std::size_t count0 = 0, count1 = 0;
    for (const auto& row : data.rows) {
        if (row.label == kLabelCalm) ++count0;
        else if (row.label == kLabelRash) ++count1;
    }
    if (count0 == 0 || count1 == 0) {
        throw std::invalid_argument("class_weights: both classes must be present");
    }
    const double k = static_cast<double>(count0 + count1);
    return {k / (2.0 * static_cast<double>(count0)), k / (2.0 * static_cast<double>(count1))};
}

double urgency_score(std::span<const int> labels) {
    if (labels.empty()) throw std::invalid_argument("urgency_score: empty label list");
    double sum = 0.0;
    for (int y : labels) sum += static_cast<double>(y);
    return sum / static_cast<double>(labels.size());
}

}  // namespace ridematch
