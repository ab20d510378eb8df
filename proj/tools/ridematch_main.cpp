// Command-line front-end for the comfort-aware matching pipeline:
// gen -> features -> train -> profile -> score -> match/sweep.
// Exit codes: 0 success, 1 validation error, 2 runtime/data error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ridematch/comfort_model.hpp"
#include "ridematch/driver_profile.hpp"
#include "ridematch/features.hpp"
#include "ridematch/io.hpp"
#include "ridematch/matching.hpp"
#include "ridematch/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ridematch;

namespace {

void require_input(const fs::path& path, const std::string& what) {
    if (!fs::exists(path)) {
        throw std::invalid_argument(what + " not found: " + path.string());
    }
}

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

// sorted (stem, path) pairs for every file with the extension in a directory
std::vector<std::pair<std::string, fs::path>> list_by_stem(const fs::path& dir,
                                                           const std::string& extension) {
    require_input(dir, "input directory");
    std::vector<std::pair<std::string, fs::path>> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == extension) {
            out.emplace_back(entry.path().stem().string(), entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) {
        throw std::invalid_argument("no " + extension + " files in " + dir.string());
    }
    return out;
}

json domain_to_json(const BoundingDomain& domain) {
    return json{{"feature_names", feature_names()},
                {"lo", domain.bounds.lo},
                {"hi", domain.bounds.hi}};
}

BoundingDomain domain_from_json(const json& j) {
    return BoundingDomain(HyperRect(j.at("lo").get<std::vector<double>>(),
                                    j.at("hi").get<std::vector<double>>()));
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void cmd_gen(const GenOptions& opt) {
    require_input(opt.config, "scenario config");
    ScenarioConfig config = load_scenario_config(opt.config);
    if (opt.seed_set) config.seed = opt.seed;

    const GeneratedScenario scenario = generate_scenario(config);
    const fs::path out(opt.out);
    fs::create_directories(out / "traces");
    fs::create_directories(out / "segments" / "drivers");
    fs::create_directories(out / "segments" / "passengers");

    for (const auto& driver : scenario.drivers) {
        for (std::size_t s = 0; s < driver.traces.size(); ++s) {
            io::write_trace_csv(out / "traces" / (driver.id + "_s" + std::to_string(s) + ".csv"),
                                driver.traces[s]);
        }
        io::write_segments_csv(out / "segments" / "drivers" / (driver.id + ".csv"),
                               driver.segments, false);
    }

    json truth = json::array();
    json epsilons = json::object();
    for (const auto& passenger : scenario.passengers) {
        io::write_segments_csv(out / "segments" / "passengers" / (passenger.id + ".csv"),
                               passenger.labeled.rows, true);
        json box = json::object();
        const auto& region = passenger.truth.true_region;
        for (std::size_t d = 0; d < kFeatureCount; ++d) {
            box[feature_names()[d]] = {region.boxes.front().lo[d], region.boxes.front().hi[d]};
        }
        truth.push_back({{"id", passenger.id},
                         {"epsilon", passenger.epsilon},
                         {"label_noise", passenger.truth.label_noise},
                         {"box", std::move(box)}});
        epsilons[passenger.id] = passenger.epsilon;
    }

    MatchInstance positions;
    for (std::size_t i = 0; i < scenario.passengers.size(); ++i) {
        positions.passenger_ids.push_back(scenario.passengers[i].id);
        positions.passenger_pos.push_back(scenario.passenger_positions[i]);
    }
    for (std::size_t j = 0; j < scenario.drivers.size(); ++j) {
        positions.driver_ids.push_back(scenario.drivers[j].id);
        positions.driver_pos.push_back(scenario.driver_positions[j]);
    }

    write_text(out / "positions.json", instance_to_json(positions).dump(2) + "\n");
    write_text(out / "domain.json", domain_to_json(scenario.domain).dump(2) + "\n");
    write_text(out / "truth.json", truth.dump(2) + "\n");
    write_text(out / "epsilons.json", epsilons.dump(2) + "\n");
    std::cerr << "gen: " << scenario.drivers.size() << " drivers, " << scenario.passengers.size()
              << " passengers, " << scenario.pooled.size() << " segments -> " << out.string()
              << "\n";
}

// ---------------------------------------------------------------------------
// features

struct FeaturesOptions {
    std::string trace;
    std::string out;
    double window_s = 10.0;
};

void cmd_features(const FeaturesOptions& opt) {
    require_input(opt.trace, "trace csv");
    if (!(opt.window_s > 0.0)) throw std::invalid_argument("--window must be positive");
    const RideTrace trace = io::read_trace_csv(opt.trace);
    std::vector<SegmentFeatures> segments;
    for (const auto& range : segment(trace, opt.window_s)) {
        segments.push_back(extract_features(trace, range));
        segments.back().segment_index = static_cast<std::int64_t>(segments.size()) - 1;
    }
    io::write_segments_csv(opt.out, segments, false);
    std::cerr << "features: " << segments.size() << " segments -> " << opt.out << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
    std::string data;
    std::string out;
    double epsilon = 0.5;
    std::string epsilon_map;
    GbdtParams params;
    std::uint64_t seed = 0;
    double holdout = 0.2;
    bool gnb = false;
};

struct ClassMetrics {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    std::size_t support = 0;
};

ClassMetrics metrics_for_class(const std::vector<int>& truth, const std::vector<int>& pred,
                               int cls) {
    std::size_t tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == cls) ++support;
        if (pred[i] == cls && truth[i] == cls) ++tp;
        if (pred[i] == cls && truth[i] != cls) ++fp;
        if (pred[i] != cls && truth[i] == cls) ++fn;
    }
    ClassMetrics m;
    m.support = support;
    m.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

void cmd_train(const TrainOptions& opt) {
    if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0)) {
        throw std::invalid_argument("--epsilon must be in (0,1)");
    }
    if (!(opt.holdout > 0.0 && opt.holdout < 1.0)) {
        throw std::invalid_argument("--holdout must be in (0,1)");
    }
    std::map<std::string, double> epsilon_map;
    if (!opt.epsilon_map.empty()) {
        require_input(opt.epsilon_map, "epsilon map");
        const json eps_json = load_json(opt.epsilon_map);
        for (const auto& [pid, eps] : eps_json.items()) {
            epsilon_map[pid] = eps.get<double>();
        }
    }

    const auto files = list_by_stem(opt.data, ".csv");
    const fs::path out(opt.out);
    fs::create_directories(out / "models");

    std::ostringstream report;
    report << "passenger_id,n_train,n_test,accuracy,precision_0,recall_0,f1_0,support_0,"
              "precision_1,recall_1,f1_1,support_1,macro_precision,macro_recall,macro_f1,"
              "weighted_precision,weighted_recall,weighted_f1\n";

    std::size_t trained = 0;
    for (const auto& [pid, path] : files) {
        const auto rows = io::read_segments_csv(path);
        for (const auto& row : rows) {
            if (row.label == kUnlabeled) {
                throw std::runtime_error("train: unlabeled row in " + path.string());
            }
        }

        // seeded holdout split, per passenger
        std::vector<std::size_t> order(rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(derive_seed(opt.seed, io::fnv1a64(pid)));
        std::shuffle(order.begin(), order.end(), rng);
        const auto cut = static_cast<std::size_t>(
            std::llround(static_cast<double>(rows.size()) * (1.0 - opt.holdout)));

        LabeledDataset train_set, test_set;
        train_set.passenger_id = pid;
        for (std::size_t k = 0; k < order.size(); ++k) {
            (k < cut ? train_set : test_set).rows.push_back(rows[order[k]]);
        }

        std::size_t train_rash = 0;
        for (const auto& row : train_set.rows) train_rash += row.label == kLabelRash;
        if (train_set.rows.empty() || test_set.rows.empty() || train_rash == 0 ||
            train_rash == train_set.rows.size()) {
            std::cerr << "train: skipping " << pid << " (single-class training split)\n";
            continue;
        }

        if (opt.gnb) train_set = gnb_label_correction(train_set);
        std::size_t corrected_rash = 0;
        for (const auto& row : train_set.rows) corrected_rash += row.label == kLabelRash;
        if (corrected_rash == 0 || corrected_rash == train_set.rows.size()) {
            std::cerr << "train: skipping " << pid << " (label correction left one class)\n";
            continue;
        }

        const double eps = epsilon_map.count(pid) ? epsilon_map.at(pid) : opt.epsilon;
        BoostedModel model =
            train_comfort_model(train_set, opt.params, class_weights(train_set), eps);
        model.feature_names.assign(feature_names().begin(), feature_names().end());
        save_model(out / "models" / (pid + ".json"), model);
        ++trained;

        std::vector<int> truth, pred;
        for (const auto& row : test_set.rows) {
            truth.push_back(row.label);
            pred.push_back(classify(model, row.values));
        }
        std::size_t correct = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i];
        const double accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
        const ClassMetrics m0 = metrics_for_class(truth, pred, 0);
        const ClassMetrics m1 = metrics_for_class(truth, pred, 1);
        const double total = static_cast<double>(m0.support + m1.support);
        const double w0 = static_cast<double>(m0.support) / total;
        const double w1 = static_cast<double>(m1.support) / total;

        report << pid << ',' << train_set.rows.size() << ',' << test_set.rows.size() << ','
               << io::format_double(accuracy) << ',' << io::format_double(m0.precision) << ','
               << io::format_double(m0.recall) << ',' << io::format_double(m0.f1) << ','
               << m0.support << ',' << io::format_double(m1.precision) << ','
               << io::format_double(m1.recall) << ',' << io::format_double(m1.f1) << ','
               << m1.support << ',' << io::format_double(0.5 * (m0.precision + m1.precision))
               << ',' << io::format_double(0.5 * (m0.recall + m1.recall)) << ','
               << io::format_double(0.5 * (m0.f1 + m1.f1)) << ','
               << io::format_double(w0 * m0.precision + w1 * m1.precision) << ','
               << io::format_double(w0 * m0.recall + w1 * m1.recall) << ','
               << io::format_double(w0 * m0.f1 + w1 * m1.f1) << '\n';
    }

    if (trained == 0) throw std::runtime_error("train: every passenger was skipped");
    write_text(out / "report.csv", report.str());
    std::cerr << "train: " << trained << "/" << files.size() << " models -> "
              << (out / "models").string() << "\n";
}

// ---------------------------------------------------------------------------
// profile

struct ProfileOptions {
    std::string data;
    std::string out;
    std::vector<double> quantiles{0.05, 0.95};
};

void cmd_profile(const ProfileOptions& opt) {
    if (opt.quantiles.size() != 2) throw std::invalid_argument("--quantiles needs lo,hi");
    const auto files = list_by_stem(opt.data, ".csv");
    std::vector<DriverProfile> profiles;
    for (const auto& [did, path] : files) {
        profiles.push_back(
            build_profile(did, io::read_segments_csv(path), opt.quantiles[0], opt.quantiles[1]));
    }
    const fs::path parent = fs::path(opt.out).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    save_profiles(opt.out, profiles);
    std::cerr << "profile: " << profiles.size() << " drivers -> " << opt.out << "\n";
}

// ---------------------------------------------------------------------------
// score

struct ScoreOptions {
    std::string models;
    std::string profiles;
    std::string domain;
    std::string out;
    std::string mode = "auto";  // auto | exact | mc
    std::size_t mc_samples = 50'000;
    std::uint64_t seed = 0;
    std::size_t cell_budget = kDefaultCellBudget;
};

json compute_scores(const ScoreOptions& opt) {
    const auto model_files = list_by_stem(opt.models, ".json");
    const auto profiles = load_profiles(opt.profiles);
    const BoundingDomain domain = domain_from_json(load_json(opt.domain));

    std::vector<std::string> passenger_ids, driver_ids;
    std::vector<BoostedModel> models;
    for (const auto& [pid, path] : model_files) {
        passenger_ids.push_back(pid);
        models.push_back(load_model(path));
    }
    for (const auto& profile : profiles) driver_ids.push_back(profile.driver_id);

    json values = json::array();
    json std_errors = json::array();
    json row_modes = json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
        bool exact = opt.mode != "mc";
        ComfortRegion region;
        if (exact) {
            try {
                region = extract_region(models[i], domain, opt.cell_budget);
            } catch (const CellBudgetExceeded& e) {
                if (opt.mode == "exact") {
                    throw std::runtime_error("score: " + passenger_ids[i] + ": " + e.what());
                }
                exact = false;
            }
        }
        json value_row = json::array();
        json error_row = json::array();
        for (std::size_t j = 0; j < profiles.size(); ++j) {
            CompatibilityScore s;
            if (exact) {
                s = compatibility(region, profiles[j].zone);
            } else {
                McParams mc;
                mc.samples = opt.mc_samples;
                mc.seed = derive_seed(opt.seed, i * profiles.size() + j);
                s = compatibility(models[i], profiles[j].zone, domain, mc);
            }
            value_row.push_back(s.value);
            error_row.push_back(s.std_error);
        }
        values.push_back(std::move(value_row));
        std_errors.push_back(std::move(error_row));
        row_modes.push_back(exact ? "exact" : "mc");
    }

    return json{{"passenger_ids", passenger_ids},
                {"driver_ids", driver_ids},
                {"row_mode", std::move(row_modes)},
                {"values", std::move(values)},
                {"std_errors", std::move(std_errors)},
                {"meta",
                 {{"mode", opt.mode},
                  {"mc_samples", opt.mc_samples},
                  {"seed", opt.seed},
                  {"cell_budget", opt.cell_budget}}}};
}

void cmd_score(const ScoreOptions& opt) {
    require_input(opt.models, "models directory");
    require_input(opt.profiles, "profiles file");
    require_input(opt.domain, "domain file");
    if (opt.mode != "auto" && opt.mode != "exact" && opt.mode != "mc") {
        throw std::invalid_argument("--mode must be auto, exact or mc");
    }

    // content-addressed cache over inputs and parameters
    std::string key_material = opt.mode + "|" + std::to_string(opt.mc_samples) + "|" +
                               std::to_string(opt.seed) + "|" + std::to_string(opt.cell_budget);
    for (const auto& [pid, path] : list_by_stem(opt.models, ".json")) {
        key_material += "|" + pid + "|" + read_text(path);
    }
    key_material += "|" + read_text(opt.profiles) + "|" + read_text(opt.domain);
    std::ostringstream key;
    key << std::hex << io::fnv1a64(key_material);

    const fs::path out(opt.out);
    const fs::path cached = out / "cache" / ("scores_" + key.str() + ".json");
    std::string payload;
    if (fs::exists(cached)) {
        payload = read_text(cached);
        std::cerr << "score: cache hit " << cached.string() << "\n";
    } else {
        payload = compute_scores(opt).dump(2) + "\n";
        write_text(cached, payload);
    }
    write_text(out / "scores.json", payload);
    std::cerr << "score: -> " << (out / "scores.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// match / sweep

struct MatchOptions {
    std::string instance;
    std::string scores;
    std::string out;
    std::vector<double> alphas{0.5};
    bool emit_assignments = false;
};

MatchInstance assemble_instance(const std::string& instance_path, const std::string& scores_path) {
    require_input(instance_path, "instance file");
    MatchInstance inst = load_instance(instance_path);

    if (inst.compatibility.empty()) {
        if (scores_path.empty()) {
            throw std::invalid_argument(
                "instance has no compatibility matrix; pass --scores scores.json");
        }
        require_input(scores_path, "scores file");
        const json scores = load_json(scores_path);
        const auto pids = scores.at("passenger_ids").get<std::vector<std::string>>();
        const auto dids = scores.at("driver_ids").get<std::vector<std::string>>();
        const auto values = scores.at("values").get<Matrix>();

        std::map<std::string, std::size_t> prow, dcol;
        for (std::size_t i = 0; i < pids.size(); ++i) prow[pids[i]] = i;
        for (std::size_t j = 0; j < dids.size(); ++j) dcol[dids[j]] = j;

        inst.compatibility.assign(inst.passenger_ids.size(),
                                  std::vector<double>(inst.driver_ids.size(), 0.0));
        for (std::size_t i = 0; i < inst.passenger_ids.size(); ++i) {
            if (!prow.count(inst.passenger_ids[i])) {
                throw std::runtime_error("scores file has no passenger " +
                                         inst.passenger_ids[i]);
            }
            for (std::size_t j = 0; j < inst.driver_ids.size(); ++j) {
                if (!dcol.count(inst.driver_ids[j])) {
                    throw std::runtime_error("scores file has no driver " + inst.driver_ids[j]);
                }
                inst.compatibility[i][j] =
                    values[prow[inst.passenger_ids[i]]][dcol[inst.driver_ids[j]]];
            }
        }
    }
    if (inst.distance.empty()) {
        inst.distance = euclidean_distance_matrix(inst.passenger_pos, inst.driver_pos);
    }
    return inst;
}

void validate_alphas(const std::vector<double>& alphas) {
    if (alphas.empty()) throw std::invalid_argument("--alpha list is empty");
    for (double alpha : alphas) {
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw std::invalid_argument("--alpha values must be in [0,1]");
        }
    }
}

void cmd_match(const MatchOptions& opt) {
    validate_alphas(opt.alphas);
    const MatchInstance inst = assemble_instance(opt.instance, opt.scores);
    const fs::path out(opt.out);
    fs::create_directories(out);
    for (double alpha : opt.alphas) {
        const Assignment assignment = solve(inst, alpha);
        const fs::path file = out / ("assignment_alpha_" + io::format_double(alpha) + ".json");
        write_text(file, assignment_to_json(assignment, inst).dump(2) + "\n");
        std::cerr << "match: alpha=" << io::format_double(alpha)
                  << " objective=" << io::format_double(assignment.objective_value) << " -> "
                  << file.string() << "\n";
    }
}

void cmd_sweep(const MatchOptions& opt) {
    validate_alphas(opt.alphas);
    const MatchInstance inst = assemble_instance(opt.instance, opt.scores);

    const auto records = alpha_sweep(inst, opt.alphas);
    const fs::path out(opt.out);
    fs::create_directories(out);
    write_sweep_csv(out / "sweep.csv", records);
    if (opt.emit_assignments) {
        for (const auto& rec : records) {
            write_text(out / ("assignment_alpha_" + io::format_double(rec.alpha) + ".json"),
                       assignment_to_json(rec.assignment, inst).dump(2) + "\n");
        }
    }
    std::cerr << "sweep: " << records.size() << " alphas -> " << (out / "sweep.csv").string()
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"comfort-aware ride-hailing matching pipeline"};
    app.require_subcommand(1);

    GenOptions gen_opt;
    auto* gen = app.add_subcommand("gen", "generate a synthetic scenario with known ground truth");
    gen->add_option("--config", gen_opt.config, "scenario config JSON")->required();
    gen->add_option("--out", gen_opt.out, "output directory")->required();
    gen->add_option("--seed", gen_opt.seed, "override the config seed")
        ->each([&gen_opt](const std::string&) { gen_opt.seed_set = true; });

    FeaturesOptions feat_opt;
    auto* feat = app.add_subcommand("features", "extract segment features from a trace CSV");
    feat->add_option("--trace", feat_opt.trace, "trace CSV (t,speed,accel,jerk)")->required();
    feat->add_option("--out", feat_opt.out, "output segments CSV")->required();
    feat->add_option("--window", feat_opt.window_s, "window length in seconds");

    TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "train per-passenger comfort models");
    train->add_option("--data", train_opt.data, "directory of labeled segment CSVs")->required();
    train->add_option("--out", train_opt.out, "output directory")->required();
    train->add_option("--epsilon", train_opt.epsilon, "default comfort threshold");
    train->add_option("--epsilon-map", train_opt.epsilon_map,
                      "JSON object mapping passenger id to epsilon");
    train->add_option("--trees", train_opt.params.n_trees, "number of boosting rounds");
    train->add_option("--depth", train_opt.params.max_depth, "maximum tree depth");
    train->add_option("--learning-rate", train_opt.params.learning_rate, "shrinkage");
    train->add_option("--lambda", train_opt.params.reg_lambda, "L2 leaf regularization");
    train->add_option("--min-child-weight", train_opt.params.min_child_weight,
                      "minimum hessian sum per child");
    train->add_option("--seed", train_opt.seed, "split seed");
    train->add_option("--holdout", train_opt.holdout, "held-out fraction for the report");
    train->add_flag("--gnb,!--no-gnb", train_opt.gnb,
                    "apply the Gaussian label correction before training");

    ProfileOptions profile_opt;
    auto* profile = app.add_subcommand("profile", "build driver operating-zone profiles");
    profile->add_option("--data", profile_opt.data, "directory of driver segment CSVs")
        ->required();
    profile->add_option("--out", profile_opt.out, "output profiles JSON")->required();
    profile->add_option("--quantiles", profile_opt.quantiles, "lo,hi quantiles")
        ->delimiter(',')
        ->expected(2);

    ScoreOptions score_opt;
    auto* score = app.add_subcommand("score", "compute the passenger-driver compatibility matrix");
    score->add_option("--models", score_opt.models, "directory of model JSON files")->required();
    score->add_option("--profiles", score_opt.profiles, "profiles JSON")->required();
    score->add_option("--domain", score_opt.domain, "domain JSON")->required();
    score->add_option("--out", score_opt.out, "output directory")->required();
    score->add_option("--mode", score_opt.mode, "auto, exact or mc");
    score->add_option("--mc-samples", score_opt.mc_samples, "Monte Carlo samples per pair");
    score->add_option("--seed", score_opt.seed, "Monte Carlo seed");
    score->add_option("--cell-budget", score_opt.cell_budget,
                      "cell limit for exact region extraction");

    MatchOptions match_opt;
    auto* match = app.add_subcommand("match", "solve the assignment at given alphas");
    match->add_option("--instance", match_opt.instance, "instance/positions JSON")->required();
    match->add_option("--scores", match_opt.scores, "scores JSON (when the instance has no A)");
    match->add_option("--out", match_opt.out, "output directory")->required();
    match->add_option("--alpha", match_opt.alphas, "alpha values")->delimiter(',');

    MatchOptions sweep_opt;
    sweep_opt.alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    auto* sweep = app.add_subcommand("sweep", "alpha sweep with Jaccard-vs-baseline metrics");
    sweep->add_option("--instance", sweep_opt.instance, "instance/positions JSON")->required();
    sweep->add_option("--scores", sweep_opt.scores, "scores JSON (when the instance has no A)");
    sweep->add_option("--out", sweep_opt.out, "output directory")->required();
    sweep->add_option("--alpha", sweep_opt.alphas, "alpha grid")->delimiter(',');
    sweep->add_flag("--emit-assignments", sweep_opt.emit_assignments,
                    "also write per-alpha assignment JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) cmd_gen(gen_opt);
        if (feat->parsed()) cmd_features(feat_opt);
        if (train->parsed()) cmd_train(train_opt);
        if (profile->parsed()) cmd_profile(profile_opt);
        if (score->parsed()) cmd_score(score_opt);
        if (match->parsed()) cmd_match(match_opt);
        if (sweep->parsed()) cmd_sweep(sweep_opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
