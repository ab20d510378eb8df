#include "ridematch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "ridematch/io.hpp"

namespace ridematch {

namespace {

void validate_matrix(const Matrix& m, std::size_t rows, std::size_t cols, const char* name,
                     bool unit_range) {
    if (m.size() != rows) throw std::invalid_argument(std::string(name) + ": wrong row count");
    for (const auto& row : m) {
        if (row.size() != cols) throw std::invalid_argument(std::string(name) + ": ragged matrix");
        for (double v : row) {
            if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + ": non-finite entry");
            if (unit_range && (v < 0.0 || v > 1.0)) {
                throw std::invalid_argument(std::string(name) + ": entry outside [0,1]");
            }
            if (!unit_range && v < 0.0) {
                throw std::invalid_argument(std::string(name) + ": negative entry");
            }
        }
    }
}

// Shortest augmenting path with potentials on a square cost matrix
// (minimization). Column scans run in index order, so equal-cost paths
// resolve to the lowest index deterministically.
std::vector<int> hungarian_min_square(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j (1-based)
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
    }
    return row_to_col;
}

}  // namespace

Matrix euclidean_distance_matrix(std::span<const Point2> passengers,
                                 std::span<const Point2> drivers) {
    Matrix d(passengers.size(), std::vector<double>(drivers.size(), 0.0));
    for (std::size_t i = 0; i < passengers.size(); ++i) {
        for (std::size_t j = 0; j < drivers.size(); ++j) {
            d[i][j] = std::hypot(passengers[i].x - drivers[j].x, passengers[i].y - drivers[j].y);
        }
    }
    return d;
}

Matrix normalize_distances(const Matrix& raw) {
    double max_entry = 0.0;
    for (const auto& row : raw) {
        for (double v : row) {
            if (!std::isfinite(v) || v < 0.0) {
                throw std::invalid_argument("normalize_distances: entries must be finite and >= 0");
            }
            max_entry = std::max(max_entry, v);
        }
    }
    Matrix out = raw;
    if (max_entry > 0.0) {
        for (auto& row : out) {
            for (double& v : row) v /= max_entry;
        }
    }
    return out;
}

Matrix utility_matrix(const MatchInstance& instance, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("utility_matrix: alpha must be in [0,1]");
    }
    const std::size_t p = instance.passenger_count();
    const std::size_t d = instance.driver_count();
    validate_matrix(instance.compatibility, p, d, "compatibility", true);
    validate_matrix(instance.distance, p, d, "distance", false);

    const Matrix dn = normalize_distances(instance.distance);
    Matrix util(p, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            util[i][j] = alpha * instance.compatibility[i][j] - (1.0 - alpha) * dn[i][j];
        }
    }
    return util;
}

std::vector<int> solve_max_assignment(const Matrix& utility) {
    const std::size_t rows = utility.size();
    const std::size_t cols = rows == 0 ? 0 : utility.front().size();
    if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);

    // Pad to square with zero-utility dummy rows/columns; dummy pairs are
    // dropped from the result.
    const std::size_t s = std::max(rows, cols);
    std::vector<std::vector<double>> cost(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) cost[i][j] = -utility[i][j];
    }

    const std::vector<int> assignment = hungarian_min_square(cost);
    std::vector<int> row_to_col(rows, -1);
    for (std::size_t i = 0; i < rows; ++i) {
        if (assignment[i] >= 0 && assignment[i] < static_cast<int>(cols)) {
            row_to_col[i] = assignment[i];
        }
    }
    return row_to_col;
}

Assignment solve(const MatchInstance& instance, double alpha) {
    Assignment result;
    result.alpha = alpha;
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("solve: alpha must be in [0,1]");
    }
    if (!instance.passenger_ids.empty() &&
        instance.passenger_ids.size() != instance.passenger_count()) {
        throw std::invalid_argument("solve: passenger ids do not match the matrix shape");
    }
    if (!instance.driver_ids.empty() && instance.driver_ids.size() != instance.driver_count()) {
        throw std::invalid_argument("solve: driver ids do not match the matrix shape");
    }
    if (instance.passenger_count() == 0 || instance.driver_count() == 0) {
        return result;
    }

    const Matrix util = utility_matrix(instance, alpha);
    const std::vector<int> row_to_col = solve_max_assignment(util);
    for (std::size_t i = 0; i < row_to_col.size(); ++i) {
        if (row_to_col[i] >= 0) {
            result.pairs.emplace_back(static_cast<int>(i), row_to_col[i]);
        }
    }
    // fixed-order objective: sum in passenger order
    for (const auto& [i, j] : result.pairs) {
        result.objective_value += util[i][j];
    }
    return result;
}

double jaccard(const Assignment& a, const Assignment& b) {
    if (a.pairs.empty() && b.pairs.empty()) return 1.0;
    std::set<std::pair<int, int>> sa(a.pairs.begin(), a.pairs.end());
    std::set<std::pair<int, int>> sb(b.pairs.begin(), b.pairs.end());
    std::size_t inter = 0;
    for (const auto& pr : sa) inter += sb.count(pr);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<SweepRecord> alpha_sweep(const MatchInstance& instance, std::span<const double> grid) {
    std::vector<SweepRecord> records;
    if (grid.empty()) return records;
    for (double a : grid) {
        if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha_sweep: alpha outside [0,1]");
    }

    const Assignment baseline_distance = solve(instance, 0.0);
    const Assignment baseline_comfort = solve(instance, 1.0);
    const Matrix dn = normalize_distances(instance.distance);

    for (double a : grid) {
        SweepRecord rec;
        rec.alpha = a;
        if (a == 0.0) {
            rec.assignment = baseline_distance;
        } else if (a == 1.0) {
            rec.assignment = baseline_comfort;
        } else {
            rec.assignment = solve(instance, a);
        }
        rec.jaccard_vs_distance = jaccard(rec.assignment, baseline_distance);
        rec.jaccard_vs_comfort = jaccard(rec.assignment, baseline_comfort);
        for (const auto& [i, j] : rec.assignment.pairs) {
            rec.total_distance += dn[i][j];
            rec.total_compatibility += instance.compatibility[i][j];
        }
        records.push_back(std::move(rec));
    }
    return records;
}

nlohmann::json instance_to_json(const MatchInstance& instance) {
    nlohmann::json passengers = nlohmann::json::array();
    for (std::size_t i = 0; i < instance.passenger_ids.size(); ++i) {
        passengers.push_back({{"id", instance.passenger_ids[i]},
                              {"x", instance.passenger_pos[i].x},
                              {"y", instance.passenger_pos[i].y}});
    }
    nlohmann::json drivers = nlohmann::json::array();
    for (std::size_t j = 0; j < instance.driver_ids.size(); ++j) {
        drivers.push_back({{"id", instance.driver_ids[j]},
                           {"x", instance.driver_pos[j].x},
                           {"y", instance.driver_pos[j].y}});
    }
    nlohmann::json j{{"passengers", std::move(passengers)}, {"drivers", std::move(drivers)}};
    if (!instance.compatibility.empty()) j["A"] = instance.compatibility;
    if (!instance.distance.empty()) j["D"] = instance.distance;
    return j;
}

MatchInstance instance_from_json(const nlohmann::json& j) {
    MatchInstance instance;
    for (const auto& p : j.at("passengers")) {
        instance.passenger_ids.push_back(p.at("id").get<std::string>());
        instance.passenger_pos.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
    }
    for (const auto& d : j.at("drivers")) {
        instance.driver_ids.push_back(d.at("id").get<std::string>());
        instance.driver_pos.push_back({d.at("x").get<double>(), d.at("y").get<double>()});
    }
    if (j.contains("A")) instance.compatibility = j.at("A").get<Matrix>();
    if (j.contains("D")) instance.distance = j.at("D").get<Matrix>();
    return instance;
}

MatchInstance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_instance: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return instance_from_json(j);
}

void save_instance(const std::filesystem::path& path, const MatchInstance& instance) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_instance: cannot open " + path.string());
    out << instance_to_json(instance).dump(2) << "\n";
}

nlohmann::json assignment_to_json(const Assignment& a, const MatchInstance& instance) {
    nlohmann::json pairs = nlohmann::json::array();
    double total_distance = 0.0, total_compatibility = 0.0;
    const Matrix dn =
        instance.distance.empty() ? Matrix{} : normalize_distances(instance.distance);
    for (const auto& [i, j] : a.pairs) {
        nlohmann::json pair{{"passenger", instance.passenger_ids[i]},
                            {"driver", instance.driver_ids[j]}};
        if (!instance.compatibility.empty()) {
            pair["compatibility"] = instance.compatibility[i][j];
            total_compatibility += instance.compatibility[i][j];
        }
        if (!dn.empty()) {
            pair["distance"] = dn[i][j];
            total_distance += dn[i][j];
        }
        pairs.push_back(std::move(pair));
    }
    return nlohmann::json{{"alpha", a.alpha},
                          {"objective", a.objective_value},
                          {"pairs", std::move(pairs)},
                          {"total_distance", total_distance},
                          {"total_compatibility", total_compatibility}};
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path.string());
    out << "alpha,jaccard_vs_distance,jaccard_vs_comfort,total_distance,total_compatibility\n";
    for (const auto& r : records) {
        out << io::format_double(r.alpha) << ',' << io::format_double(r.jaccard_vs_distance) << ','
            << io::format_double(r.jaccard_vs_comfort) << ',' << io::format_double(r.total_distance)
            << ',' << io::format_double(r.total_compatibility) << '\n';
    }
}

}  // namespace ridematch
