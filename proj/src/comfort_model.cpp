#include "ridematch/comfort_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace ridematch {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct TrainContext {
    const LabeledDataset& data;
    const GbdtParams& params;
    std::vector<double> grad;
    std::vector<double> hess;
};

// Exact greedy split search over sorted feature values. Ties in gain keep
// the first candidate (lowest feature index, lowest threshold) so training
// is fully deterministic.
int build_node(Tree& tree, TrainContext& ctx, std::vector<int>& rows, int depth) {
    double g_sum = 0.0, h_sum = 0.0;
    for (int i : rows) {
        g_sum += ctx.grad[i];
        h_sum += ctx.hess[i];
    }
    const double lambda = ctx.params.reg_lambda;

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node_id].leaf_value = -g_sum / (h_sum + lambda);

    if (depth >= ctx.params.max_depth || rows.size() < 2) return node_id;

    const double parent_score = g_sum * g_sum / (h_sum + lambda);
    const std::size_t n_features = ctx.data.rows.front().values.size();

    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<int> order(rows);
    for (std::size_t d = 0; d < n_features; ++d) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double va = ctx.data.rows[a].values[d];
            const double vb = ctx.data.rows[b].values[d];
            if (va != vb) return va < vb;
            return a < b;
        });

        double gl = 0.0, hl = 0.0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            gl += ctx.grad[order[k]];
            hl += ctx.hess[order[k]];
            const double vk = ctx.data.rows[order[k]].values[d];
            const double vn = ctx.data.rows[order[k + 1]].values[d];
            if (vk == vn) continue;

            const double gr = g_sum - gl;
            const double hr = h_sum - hl;
            if (hl < ctx.params.min_child_weight || hr < ctx.params.min_child_weight) continue;

            const double gain =
                gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_score;
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = static_cast<int>(d);
                best_threshold = 0.5 * (vk + vn);
            }
        }
    }

    if (best_feature < 0) return node_id;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (int i : rows) {
        if (ctx.data.rows[i].values[best_feature] < best_threshold) {
            left_rows.push_back(i);
        } else {
            right_rows.push_back(i);
        }
    }

    tree.nodes[node_id].feature = best_feature;
    tree.nodes[node_id].threshold = best_threshold;
    const int left = build_node(tree, ctx, left_rows, depth + 1);
    tree.nodes[node_id].left = left;
    const int right = build_node(tree, ctx, right_rows, depth + 1);
    tree.nodes[node_id].right = right;
    return node_id;
}

double raw_margin(const BoostedModel& model, std::span<const double> x, std::size_t first_trees) {
    double acc = 0.0;
    const std::size_t t_end = std::min(first_trees, model.trees.size());
    for (std::size_t t = 0; t < t_end; ++t) acc += model.trees[t].eval(x);
    return model.base_score + model.params.learning_rate * acc;
}

}  // namespace

double Tree::eval(std::span<const double> x) const {
    int idx = 0;
    while (!nodes[idx].is_leaf()) {
        idx = (x[nodes[idx].feature] < nodes[idx].threshold) ? nodes[idx].left : nodes[idx].right;
    }
    return nodes[idx].leaf_value;
}

void Tree::collect_thresholds(std::vector<std::vector<double>>& per_dim) const {
    for (const auto& node : nodes) {
        if (!node.is_leaf()) per_dim[node.feature].push_back(node.threshold);
    }
}

BoostedModel train_comfort_model(const LabeledDataset& data, const GbdtParams& params,
                                 std::pair<double, double> weights, double epsilon) {
    if (data.rows.empty()) throw std::invalid_argument("train: empty dataset");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("train: epsilon must be in (0,1)");
    if (params.n_trees < 0 || params.max_depth < 1) throw std::invalid_argument("train: bad hyperparameters");

    const std::size_t n_features = data.rows.front().values.size();
    std::size_t count0 = 0, count1 = 0;
    for (const auto& row : data.rows) {
        if (row.values.size() != n_features) {
            throw std::invalid_argument("train: non-uniform feature count");
        }
        for (double v : row.values) {
            if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite feature value");
        }
        if (row.label == kLabelCalm) ++count0;
        else if (row.label == kLabelRash) ++count1;
        else throw std::invalid_argument("train: unlabeled row");
    }
    if (count0 == 0 || count1 == 0) {
        throw std::invalid_argument("train: both classes must be present");
    }

    BoostedModel model;
    model.feature_count = n_features;
    model.epsilon = epsilon;
    model.class_weights = weights;
    model.params = params;

    const std::size_t n = data.rows.size();
    std::vector<double> w(n);
    double w_pos = 0.0, w_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = (data.rows[i].label == kLabelRash) ? weights.second : weights.first;
        (data.rows[i].label == kLabelRash ? w_pos : w_neg) += w[i];
    }
    model.base_score = std::log(w_pos / w_neg);

    std::vector<double> margin(n, model.base_score);
    TrainContext ctx{data, params, std::vector<double>(n), std::vector<double>(n)};

    for (int t = 0; t < params.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margin[i]);
            const double y = (data.rows[i].label == kLabelRash) ? 1.0 : 0.0;
            ctx.grad[i] = w[i] * (p - y);
            ctx.hess[i] = w[i] * p * (1.0 - p);
        }
        Tree tree;
        std::vector<int> rows(n);
        std::iota(rows.begin(), rows.end(), 0);
        build_node(tree, ctx, rows, 0);
        for (std::size_t i = 0; i < n; ++i) {
            margin[i] += params.learning_rate * tree.eval(data.rows[i].values);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

double score(const BoostedModel& model, std::span<const double> x) {
    if (x.size() != model.feature_count) {
        throw std::invalid_argument("score: feature vector has wrong dimension");
    }
    return sigmoid(raw_margin(model, x, model.trees.size()));
}

int classify(const BoostedModel& model, std::span<const double> x) {
    return score(model, x) >= model.epsilon ? kLabelRash : kLabelCalm;
}

double weighted_logistic_loss(const BoostedModel& model, const LabeledDataset& data,
                              std::size_t first_trees) {
    double loss = 0.0;
    for (const auto& row : data.rows) {
        const double w =
            (row.label == kLabelRash) ? model.class_weights.second : model.class_weights.first;
        const double z = raw_margin(model, row.values, first_trees);
        const double y = (row.label == kLabelRash) ? 1.0 : 0.0;
        // log(1 + e^z) - y*z, evaluated stably
        const double softplus = (z > 0.0) ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += w * (softplus - y * z);
    }
    return loss;
}

CellBudgetExceeded::CellBudgetExceeded(double cells, std::size_t limit)
    : std::runtime_error("extract_region: threshold grid has " + std::to_string(cells) +
                         " cells, exceeding the budget of " + std::to_string(limit)),
      cell_count(cells),
      budget(limit) {}

ComfortRegion extract_region(const BoostedModel& model, const BoundingDomain& domain,
                             std::size_t cell_budget) {
    const std::size_t n = model.feature_count;
    if (domain.dim() != n) throw std::invalid_argument("extract_region: domain dimension mismatch");
    if (cell_budget == 0) throw std::invalid_argument("extract_region: zero cell budget");

    // Per-dimension grid boundaries: domain edges plus every split
    // threshold strictly inside the domain.
    std::vector<std::vector<double>> thresholds(n);
    for (const auto& tree : model.trees) tree.collect_thresholds(thresholds);

    std::vector<std::vector<double>> bounds(n);
    for (std::size_t d = 0; d < n; ++d) {
        auto& ts = thresholds[d];
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        bounds[d].push_back(domain.bounds.lo[d]);
        for (double t : ts) {
            if (t > domain.bounds.lo[d] && t < domain.bounds.hi[d]) bounds[d].push_back(t);
        }
        bounds[d].push_back(domain.bounds.hi[d]);
    }

    double cell_count = 1.0;
    std::vector<std::size_t> cells_per_dim(n);
    for (std::size_t d = 0; d < n; ++d) {
        cells_per_dim[d] = bounds[d].size() - 1;
        cell_count *= static_cast<double>(cells_per_dim[d]);
    }
    if (cell_count > static_cast<double>(cell_budget)) {
        throw CellBudgetExceeded(cell_count, cell_budget);
    }
    const auto total = static_cast<std::size_t>(cell_count);

    // The score is constant on every open cell, so the center value is the
    // cell value.
    std::vector<std::uint8_t> kept(total, 0);
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> center(n);
    for (std::size_t c = 0; c < total; ++c) {
        for (std::size_t d = 0; d < n; ++d) {
            center[d] = 0.5 * (bounds[d][idx[d]] + bounds[d][idx[d] + 1]);
        }
        kept[c] = score(model, center) < model.epsilon ? 1 : 0;
        for (std::size_t d = n; d-- > 0;) {
            if (++idx[d] < cells_per_dim[d]) break;
            idx[d] = 0;
        }
    }

    // Integer-coordinate boxes [lo, hi) over the grid. First collect
    // maximal runs along the last axis, then repeatedly fuse boxes that
    // are identical in every other axis and adjacent along one.
    struct CellBox {
        std::vector<std::size_t> lo, hi;
    };
    std::vector<CellBox> boxes;

    std::vector<std::size_t> prefix(n, 0);
    const std::size_t last = n - 1;
    bool done = false;
    while (!done) {
        std::size_t flat_base = 0;
        for (std::size_t d = 0; d < n; ++d) {
            flat_base = flat_base * cells_per_dim[d] + prefix[d];
        }
        // prefix[last] is always 0 here; scan the full last-axis line
        std::size_t k = 0;
        while (k < cells_per_dim[last]) {
            if (!kept[flat_base + k]) {
                ++k;
                continue;
            }
            std::size_t run_end = k + 1;
            while (run_end < cells_per_dim[last] && kept[flat_base + run_end]) ++run_end;
            CellBox box{prefix, prefix};
            box.lo[last] = k;
            box.hi[last] = run_end;
            for (std::size_t d = 0; d < last; ++d) box.hi[d] = prefix[d] + 1;
            boxes.push_back(std::move(box));
            k = run_end;
        }
        done = true;
        for (std::size_t d = last; d-- > 0;) {
            if (++prefix[d] < cells_per_dim[d]) {
                done = false;
                break;
            }
            prefix[d] = 0;
        }
    }

    for (std::size_t d = last; d-- > 0;) {
        // key: every interval except the one along axis d
        std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            std::vector<std::size_t> key;
            key.reserve(2 * n);
            for (std::size_t dd = 0; dd < n; ++dd) {
                if (dd == d) continue;
                key.push_back(boxes[b].lo[dd]);
                key.push_back(boxes[b].hi[dd]);
            }
            groups[std::move(key)].push_back(b);
        }
        std::vector<CellBox> merged;
        merged.reserve(boxes.size());
        for (auto& [key, members] : groups) {
            std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b2) {
                return boxes[a].lo[d] < boxes[b2].lo[d];
            });
            CellBox current = boxes[members.front()];
            for (std::size_t m = 1; m < members.size(); ++m) {
                const CellBox& next = boxes[members[m]];
                if (next.lo[d] == current.hi[d]) {
                    current.hi[d] = next.hi[d];
                } else {
                    merged.push_back(current);
                    current = next;
                }
            }
            merged.push_back(current);
        }
        boxes = std::move(merged);
    }

    std::vector<HyperRect> rects;
    rects.reserve(boxes.size());
    for (const auto& box : boxes) {
        std::vector<double> lo(n), hi(n);
        for (std::size_t d = 0; d < n; ++d) {
            lo[d] = bounds[d][box.lo[d]];
            hi[d] = bounds[d][box.hi[d]];
        }
        rects.emplace_back(std::move(lo), std::move(hi));
    }

    ComfortRegion out;
    out.region = RegionUnion(std::move(rects), n);
    out.epsilon_used = model.epsilon;
    out.domain = domain;
    return out;
}

CompatibilityScore compatibility(const ComfortRegion& region, const HyperRect& zone) {
    const auto zone_eff = clip(zone, region.domain.bounds);
    if (!zone_eff) return {0.0, 0.0, CompatMode::exact};
    const double zv = volume(*zone_eff);
    if (zv <= 0.0) return {0.0, 0.0, CompatMode::exact};
    const double raw = union_intersect_volume(region.region, *zone_eff);
    return {std::clamp(raw / zv, 0.0, 1.0), 0.0, CompatMode::exact};
}

CompatibilityScore compatibility(const BoostedModel& model, const HyperRect& zone,
                                 const BoundingDomain& domain, const McParams& mc) {
    if (zone.dim() != model.feature_count) {
        throw std::invalid_argument("compatibility: zone dimension mismatch");
    }
    const auto zone_eff = clip(zone, domain.bounds);
    if (!zone_eff) return {0.0, 0.0, CompatMode::mc};
    const double zv = volume(*zone_eff);
    if (zv <= 0.0) return {0.0, 0.0, CompatMode::mc};

    const auto member = [&](std::span<const double> x) { return score(model, x) < model.epsilon; };
    const McEstimate est = mc_region_intersect_volume(member, *zone_eff, domain, mc.samples, mc.seed);
    return {std::clamp(est.estimate / zv, 0.0, 1.0), est.std_error / zv, CompatMode::mc};
}

CompatibilityScore compatibility_auto(const BoostedModel& model, const HyperRect& zone,
                                      const BoundingDomain& domain, std::size_t cell_budget,
                                      const McParams& mc) {
    try {
        return compatibility(extract_region(model, domain, cell_budget), zone);
    } catch (const CellBudgetExceeded&) {
        return compatibility(model, zone, domain, mc);
    }
}

nlohmann::json model_to_json(const BoostedModel& model) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json t;
        auto& feature = t["feature"] = nlohmann::json::array();
        auto& threshold = t["threshold"] = nlohmann::json::array();
        auto& left = t["left"] = nlohmann::json::array();
        auto& right = t["right"] = nlohmann::json::array();
        auto& leaf_value = t["leaf_value"] = nlohmann::json::array();
        for (const auto& node : tree.nodes) {
            feature.push_back(node.feature);
            threshold.push_back(node.threshold);
            left.push_back(node.left);
            right.push_back(node.right);
            leaf_value.push_back(node.leaf_value);
        }
        trees.push_back(std::move(t));
    }
    return nlohmann::json{{"version", 1},
                          {"feature_count", model.feature_count},
                          {"feature_names", model.feature_names},
                          {"epsilon", model.epsilon},
                          {"base_score", model.base_score},
                          {"class_weights", {model.class_weights.first, model.class_weights.second}},
                          {"n_trees", model.params.n_trees},
                          {"max_depth", model.params.max_depth},
                          {"learning_rate", model.params.learning_rate},
                          {"reg_lambda", model.params.reg_lambda},
                          {"min_child_weight", model.params.min_child_weight},
                          {"trees", std::move(trees)}};
}

BoostedModel model_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1) {
        throw std::runtime_error("model_from_json: unsupported version");
    }
    BoostedModel model;
    model.feature_count = j.at("feature_count").get<std::size_t>();
    model.feature_names = j.value("feature_names", std::vector<std::string>{});
    model.epsilon = j.at("epsilon").get<double>();
    model.base_score = j.at("base_score").get<double>();
    const auto& cw = j.at("class_weights");
    model.class_weights = {cw.at(0).get<double>(), cw.at(1).get<double>()};
    model.params.n_trees = j.at("n_trees").get<int>();
    model.params.max_depth = j.at("max_depth").get<int>();
    model.params.learning_rate = j.at("learning_rate").get<double>();
    model.params.reg_lambda = j.at("reg_lambda").get<double>();
    model.params.min_child_weight = j.at("min_child_weight").get<double>();
    for (const auto& t : j.at("trees")) {
        Tree tree;
        const auto& feature = t.at("feature");
        const auto& threshold = t.at("threshold");
        const auto& left = t.at("left");
        const auto& right = t.at("right");
        const auto& leaf_value = t.at("leaf_value");
        for (std::size_t i = 0; i < feature.size(); ++i) {
            TreeNode node;
            node.feature = feature.at(i).get<int>();
            node.threshold = threshold.at(i).get<double>();
            node.left = left.at(i).get<int>();
            node.right = right.at(i).get<int>();
            node.leaf_value = leaf_value.at(i).get<double>();
            if (node.feature >= static_cast<int>(model.feature_count)) {
                throw std::runtime_error("model_from_json: split feature out of range");
            }
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

void save_model(const std::filesystem::path& path, const BoostedModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
    out << model_to_json(model).dump(2) << "\n";
}

BoostedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return model_from_json(j);
}

}  // namespace ridematch
