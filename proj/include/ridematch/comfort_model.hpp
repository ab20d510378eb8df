#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ridematch/features.hpp"
#include "ridematch/geometry.hpp"

namespace ridematch {

/// One node of a regression tree, stored flat. Internal nodes route
/// x[feature] < threshold to the left child.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double eval(std::span<const double> x) const;
    void collect_thresholds(std::vector<std::vector<double>>& per_dim) const;
};

struct GbdtParams {
    int n_trees = 60;
    int max_depth = 3;
    double learning_rate = 0.15;
    double reg_lambda = 1.0;        // L2 on leaf weights
    double min_child_weight = 1.0;  // minimum hessian sum per child
};

/// Boosted ensemble for one passenger. The classifier output is
/// sigmoid(base_score + learning_rate * sum_t tree_t(x)); epsilon is the
/// passenger's comfort threshold on that score.
struct BoostedModel {
    std::vector<Tree> trees;
    double base_score = 0.0;  // initial log-odds
    double epsilon = 0.5;
    std::size_t feature_count = 0;
    std::pair<double, double> class_weights{1.0, 1.0};
    GbdtParams params;
    std::vector<std::string> feature_names;  // optional, for persistence
};

/// Second-order gradient boosting of the weighted logistic loss with
/// exact greedy split search and L2 leaf regularization. Requires at
/// least one row per class and finite features.
BoostedModel train_comfort_model(const LabeledDataset& data, const GbdtParams& params,
                                 std::pair<double, double> weights, double epsilon);

double score(const BoostedModel& model, std::span<const double> x);

/// 1 (uncomfortable) iff score(x) >= epsilon; the boundary counts as
/// uncomfortable.
int classify(const BoostedModel& model, std::span<const double> x);

double weighted_logistic_loss(const BoostedModel& model, const LabeledDataset& data,
                              std::size_t first_trees);

struct ComfortRegion {
    RegionUnion region;  // disjoint boxes, equal to {x in domain : score(x) < epsilon}
    double epsilon_used = 0.0;
    BoundingDomain domain;
};

class CellBudgetExceeded : public std::runtime_error {
public:
    CellBudgetExceeded(double cells, std::size_t limit);

    double cell_count;   // double: cell counts overflow integers in high dimension
    std::size_t budget;
};

inline constexpr std::size_t kDefaultCellBudget = 2'000'000;

/// Enumerate the grid induced by all split thresholds (the score is
/// constant on each cell), keep cells whose center scores below epsilon,
/// and merge adjacent kept cells axis by axis into maximal disjoint
/// boxes. Throws CellBudgetExceeded when the grid is larger than
/// cell_budget; callers then fall back to Monte Carlo membership.
ComfortRegion extract_region(const BoostedModel& model, const BoundingDomain& domain,
                             std::size_t cell_budget = kDefaultCellBudget);

enum class CompatMode { exact, mc };

struct McParams {
    std::size_t samples = 50'000;
    std::uint64_t seed = 0;
};

/// Compatibility between a comfort region and an operating zone:
/// intersection volume normalized by the zone volume, so full containment
/// of the zone maps to 1. std_error is zero in exact mode.
struct CompatibilityScore {
    double value = 0.0;
    double std_error = 0.0;
    CompatMode mode = CompatMode::exact;
};

CompatibilityScore compatibility(const ComfortRegion& region, const HyperRect& zone);
CompatibilityScore compatibility(const BoostedModel& model, const HyperRect& zone,
                                 const BoundingDomain& domain, const McParams& mc);

/// Exact when the threshold grid fits the cell budget, Monte Carlo
/// otherwise.
CompatibilityScore compatibility_auto(const BoostedModel& model, const HyperRect& zone,
                                      const BoundingDomain& domain, std::size_t cell_budget,
                                      const McParams& mc);

nlohmann::json model_to_json(const BoostedModel& model);
BoostedModel model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const BoostedModel& model);
BoostedModel load_model(const std::filesystem::path& path);

}  // namespace ridematch
