#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ridematch/features.hpp"
#include "ridematch/geometry.hpp"

namespace ridematch {

/// A driver's operating zone: the per-dimension quantile box of their
/// historical segment features.
struct DriverProfile {
    std::string driver_id;
    HyperRect zone;
    double quantile_lo = 0.05;
    double quantile_hi = 0.95;
    std::size_t sample_count = 0;
};

/// Per-dimension [Q(q_lo), Q(q_hi)] with the same linear-interpolation
/// quantile convention as the feature statistics.
DriverProfile build_profile(const std::string& driver_id,
                            const std::vector<SegmentFeatures>& samples,
                            double q_lo = 0.05, double q_hi = 0.95);

nlohmann::json profile_to_json(const DriverProfile& profile);
DriverProfile profile_from_json(const nlohmann::json& j);

void save_profiles(const std::filesystem::path& path, const std::vector<DriverProfile>& profiles);
std::vector<DriverProfile> load_profiles(const std::filesystem::path& path);

}  // namespace ridematch
