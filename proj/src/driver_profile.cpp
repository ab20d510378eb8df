#include "ridematch/driver_profile.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "ridematch/stats.hpp"

namespace ridematch {

DriverProfile build_profile(const std::string& driver_id,
                            const std::vector<SegmentFeatures>& samples,
                            double q_lo, double q_hi) {
    if (samples.empty()) throw std::invalid_argument("build_profile: no samples");
    if (!(q_lo >= 0.0 && q_lo < q_hi && q_hi <= 1.0)) {
        throw std::invalid_argument("build_profile: need 0 <= q_lo < q_hi <= 1");
    }
    const std::size_t n = samples.front().values.size();
    for (const auto& s : samples) {
        if (s.values.size() != n) throw std::invalid_argument("build_profile: non-uniform feature count");
    }

    std::vector<double> lo(n), hi(n), column(samples.size());
    for (std::size_t d = 0; d < n; ++d) {
        for (std::size_t i = 0; i < samples.size(); ++i) column[i] = samples[i].values[d];
        std::sort(column.begin(), column.end());
        lo[d] = stats::quantile_sorted(column, q_lo);
        hi[d] = stats::quantile_sorted(column, q_hi);
    }

    DriverProfile profile;
    profile.driver_id = driver_id;
    profile.zone = HyperRect(std::move(lo), std::move(hi));
    profile.quantile_lo = q_lo;
    profile.quantile_hi = q_hi;
    profile.sample_count = samples.size();
    return profile;
}

nlohmann::json profile_to_json(const DriverProfile& profile) {
    return nlohmann::json{{"driver_id", profile.driver_id},
                          {"quantile_lo", profile.quantile_lo},
                          {"quantile_hi", profile.quantile_hi},
                          {"sample_count", profile.sample_count},
                          {"lo", profile.zone.lo},
                          {"hi", profile.zone.hi}};
}

DriverProfile profile_from_json(const nlohmann::json& j) {
    DriverProfile profile;
    profile.driver_id = j.at("driver_id").get<std::string>();
    profile.quantile_lo = j.at("quantile_lo").get<double>();
    profile.quantile_hi = j.at("quantile_hi").get<double>();
    profile.sample_count = j.at("sample_count").get<std::size_t>();
    profile.zone = HyperRect(j.at("lo").get<std::vector<double>>(),
                             j.at("hi").get<std::vector<double>>());
    return profile;
}

void save_profiles(const std::filesystem::path& path, const std::vector<DriverProfile>& profiles) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : profiles) arr.push_back(profile_to_json(p));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_profiles: cannot open " + path.string());
    out << arr.dump(2) << "\n";
}

std::vector<DriverProfile> load_profiles(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_profiles: cannot open " + path.string());
    nlohmann::json arr;
    in >> arr;
    std::vector<DriverProfile> profiles;
    for (const auto& j : arr) profiles.push_back(profile_from_json(j));
    return profiles;
}

}  // namespace ridematch
