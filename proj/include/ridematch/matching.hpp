#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ridematch {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using Matrix = std::vector<std::vector<double>>;

/// One matching instance: positions plus the compatibility matrix A (in
/// [0,1]) and the raw distance matrix. Distances are normalized by the
/// solver, not stored normalized.
struct MatchInstance {
    std::vector<std::string> passenger_ids;
    std::vector<std::string> driver_ids;
    std::vector<Point2> passenger_pos;
    std::vector<Point2> driver_pos;
    Matrix compatibility;  // |P| x |D|
    Matrix distance;       // |P| x |D|, raw, >= 0

    std::size_t passenger_count() const { return compatibility.size(); }
    std::size_t driver_count() const {
        return compatibility.empty() ? 0 : compatibility.front().size();
    }
};

/// One-to-one matching of the smaller side. pairs is sorted by passenger
/// index; objective_value is the utility sum over matched pairs evaluated
/// in that order.
struct Assignment {
    std::vector<std::pair<int, int>> pairs;  // (passenger, driver)
    double objective_value = 0.0;
    double alpha = 0.0;
};

Matrix euclidean_distance_matrix(std::span<const Point2> passengers,
                                 std::span<const Point2> drivers);

/// Divide every entry by the global maximum; an all-zero matrix stays
/// all-zero. Negative entries are an error.
Matrix normalize_distances(const Matrix& raw);

/// alpha * A - (1 - alpha) * normalize_distances(D), the per-pair utility.
Matrix utility_matrix(const MatchInstance& instance, double alpha);

/// Exact utility-maximizing assignment (Hungarian / shortest augmenting
/// path on the square-padded matrix). Deterministic: ties prefer lower
/// indices through the fixed scan order.
Assignment solve(const MatchInstance& instance, double alpha);

/// |pairs1 ∩ pairs2| / |pairs1 ∪ pairs2|; two empty assignments give 1.
double jaccard(const Assignment& a, const Assignment& b);

struct SweepRecord {
    double alpha = 0.0;
    Assignment assignment;
    double jaccard_vs_distance = 0.0;  // against the alpha = 0 baseline
    double jaccard_vs_comfort = 0.0;   // against the alpha = 1 baseline
    double total_distance = 0.0;       // normalized distance over matched pairs
    double total_compatibility = 0.0;
};

std::vector<SweepRecord> alpha_sweep(const MatchInstance& instance, std::span<const double> grid);

/// Low-level solver: max-utility one-to-one assignment on an arbitrary
/// rectangular matrix. Returns the matched column per row (-1 when the
/// row stays unmatched because columns ran out).
std::vector<int> solve_max_assignment(const Matrix& utility);

nlohmann::json instance_to_json(const MatchInstance& instance);
MatchInstance instance_from_json(const nlohmann::json& j);
MatchInstance load_instance(const std::filesystem::path& path);
void save_instance(const std::filesystem::path& path, const MatchInstance& instance);

nlohmann::json assignment_to_json(const Assignment& a, const MatchInstance& instance);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records);

}  // namespace ridematch
