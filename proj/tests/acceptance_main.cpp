// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each. The process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "ridematch/comfort_model.hpp"
#include "ridematch/driver_profile.hpp"
#include "ridematch/features.hpp"
#include "ridematch/io.hpp"
#include "ridematch/matching.hpp"
#include "ridematch/scenario.hpp"

namespace fs = std::filesystem;
using namespace ridematch;

namespace {

const std::string kCli = RIDEMATCH_CLI_PATH;
const std::string kConfigs = RIDEMATCH_CONFIG_DIR;

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// 1. assignment optimality against the exhaustive oracle

bool criterion_assignment_optimality(std::string& detail) {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> size_dist(1, 7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double alphas[] = {0.0, 0.25, 0.5, 0.75, 1.0};

    const auto start = std::chrono::steady_clock::now();
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = size_dist(rng), d = size_dist(rng);
        MatchInstance inst;
        inst.passenger_ids.resize(p);
        inst.driver_ids.resize(d);
        inst.passenger_pos.resize(p);
        inst.driver_pos.resize(d);
        inst.compatibility.assign(p, std::vector<double>(d, 0.0));
        inst.distance.assign(p, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                inst.compatibility[i][j] = unit(rng);
                inst.distance[i][j] = 25.0 * unit(rng);
            }
        }
        for (double alpha : alphas) {
            const Assignment got = solve(inst, alpha);
            const auto want = oracles::brute_force_max_assignment(utility_matrix(inst, alpha));
            if (got.objective_value != want.best) ++mismatches;  // exact float equality
        }
    }
    const double seconds = elapsed_s(start);
    std::ostringstream ss;
    ss << "200 instances x 5 alphas, " << mismatches << " objective mismatches, "
       << seconds << " s";
    detail = ss.str();
    return mismatches == 0 && seconds < 10.0;
}

// ---------------------------------------------------------------------------
// 2. closed-form intersection sum vs grid oracle, and MC within 4 sigma

bool criterion_volume_exactness(std::string& detail) {
    std::mt19937_64 rng(777);
    int grid_failures = 0;
    int mc_failures = 0;
    int cases = 0;
    while (cases < 100) {
        const std::size_t n = 2 + static_cast<std::size_t>(cases % 2);  // 2 or 3 dims
        std::vector<double> lo(n, 0.0), hi(n, 1.0);
        const HyperRect domain_rect(lo, hi);
        const auto region = oracles::random_disjoint_region(rng, domain_rect, 2);
        const auto zone = oracles::random_box(rng, domain_rect);
        const double zone_vol = volume(zone);
        if (zone_vol <= 0.0) continue;
        const double exact = union_intersect_volume(region, zone);
        const double frac = exact / zone_vol;
        if (frac < 0.05 || frac > 0.95) continue;  // keep the MC std_error informative
        ++cases;

        const auto grid =
            oracles::grid_count_intersection(region, zone, n == 2 ? 400 : 64);
        if (std::abs(exact - grid.approx) > grid.tolerance()) ++grid_failures;

        const auto member = [&](std::span<const double> x) { return region.contains(x); };
        const auto est = mc_region_intersect_volume(member, zone, BoundingDomain(domain_rect),
                                                    1'000'000, rng());
        if (std::abs(est.estimate - exact) > 4.0 * est.std_error) ++mc_failures;
    }
    std::ostringstream ss;
    ss << "100 regions: " << grid_failures << " grid-oracle misses, " << mc_failures
       << " MC outside 4*std_error (allowed: 1)";
    detail = ss.str();
    return grid_failures == 0 && mc_failures <= 1;
}

// ---------------------------------------------------------------------------
// 3. region extraction fidelity on trained 2D models

LabeledDataset boxy_2d(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LabeledDataset data;
    const double a = 0.25 + 0.5 * unit(rng);
    const double b = 0.25 + 0.5 * unit(rng);
    for (std::size_t i = 0; i < n; ++i) {
        SegmentFeatures row;
        row.values = {unit(rng), unit(rng)};
        row.label = (row.values[0] > a && row.values[1] < b) ? 1 : 0;
        if (unit(rng) < 0.05) row.label = 1 - row.label;
        data.rows.push_back(row);
    }
    data.rows[0].label = 0;
    data.rows[1].label = 1;
    return data;
}

bool criterion_region_fidelity(std::string& detail) {
    std::mt19937_64 rng(1710);
    std::uniform_real_distribution<double> unit(-0.1, 1.1);
    std::size_t far_disagreements = 0;
    std::size_t near_threshold = 0;
    for (int m = 0; m < 20; ++m) {
        const auto data = boxy_2d(400, 52000 + static_cast<std::uint64_t>(m));
        GbdtParams params;
        params.n_trees = 25;
        params.learning_rate = 0.2;
        const auto model = train_comfort_model(data, params, class_weights(data), 0.5);
        const BoundingDomain domain(HyperRect({-0.1, -0.1}, {1.1, 1.1}));
        const auto region = extract_region(model, domain);

        std::vector<std::vector<double>> thresholds(2);
        for (const auto& tree : model.trees) tree.collect_thresholds(thresholds);

        for (int i = 0; i < 10'000; ++i) {
            const std::vector<double> x{unit(rng), unit(rng)};
            if (region.region.contains(x) == (score(model, x) < model.epsilon)) continue;
            double min_dist = 1e300;
            for (std::size_t d = 0; d < 2; ++d) {
                for (double t : thresholds[d]) min_dist = std::min(min_dist, std::abs(x[d] - t));
            }
            if (min_dist > 1e-9) {
                ++far_disagreements;
            } else {
                ++near_threshold;
            }
        }
    }
    std::ostringstream ss;
    ss << "20 models x 10000 points: " << far_disagreements
       << " disagreements farther than 1e-9 from any threshold (" << near_threshold
       << " on-threshold)";
    detail = ss.str();
    return far_disagreements == 0;
}

// ---------------------------------------------------------------------------
// 4. pipeline recoverability on the demo scenario

struct EvalResult {
    double accuracy = 0.0, f1_0 = 0.0, f1_1 = 0.0;
};

EvalResult train_and_eval(const LabeledDataset& labeled, double epsilon, std::uint64_t seed) {
    std::vector<std::size_t> order(labeled.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t cut = order.size() * 8 / 10;

    LabeledDataset train_set, test_set;
    for (std::size_t k = 0; k < order.size(); ++k) {
        (k < cut ? train_set : test_set).rows.push_back(labeled.rows[order[k]]);
    }
    const auto model = train_comfort_model(train_set, GbdtParams{}, class_weights(train_set),
                                           epsilon);

    std::size_t correct = 0;
    std::size_t tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
    for (const auto& row : test_set.rows) {
        const int pred = classify(model, row.values);
        correct += pred == row.label;
        for (int cls = 0; cls < 2; ++cls) {
            if (pred == cls && row.label == cls) ++tp[cls];
            if (pred == cls && row.label != cls) ++fp[cls];
            if (pred != cls && row.label == cls) ++fn[cls];
        }
    }
    EvalResult r;
    r.accuracy = static_cast<double>(correct) / static_cast<double>(test_set.rows.size());
    const auto f1 = [&](int cls) {
        const double denom = static_cast<double>(2 * tp[cls] + fp[cls] + fn[cls]);
        return denom > 0.0 ? 2.0 * static_cast<double>(tp[cls]) / denom : 0.0;
    };
    r.f1_0 = f1(0);
    r.f1_1 = f1(1);
    return r;
}

bool criterion_pipeline_recoverability(std::string& detail) {
    const auto config = load_scenario_config(kConfigs + "/demo.json");
    const auto scenario = generate_scenario(config);
    if (scenario.pooled.size() < 500) {
        detail = "scenario has fewer than 500 segments";
        return false;
    }

    std::size_t passing = 0;
    double worst_acc = 1.0;
    for (const auto& passenger : scenario.passengers) {
        const EvalResult r =
            train_and_eval(passenger.labeled, passenger.epsilon, io::fnv1a64(passenger.id));
        worst_acc = std::min(worst_acc, r.accuracy);
        if (r.accuracy >= 0.90 && r.f1_0 >= 0.85 && r.f1_1 >= 0.85) ++passing;
    }
    const std::size_t needed = (scenario.passengers.size() * 9 + 9) / 10;  // ceil(0.9 n)
    std::ostringstream ss;
    ss << passing << "/" << scenario.passengers.size()
       << " passengers reach acc>=0.90 and both F1>=0.85 (need " << needed
       << "); worst accuracy " << worst_acc;
    detail = ss.str();
    return passing >= needed;
}

// ---------------------------------------------------------------------------
// 5. alpha-sweep endpoint behavior on the demo instance

bool criterion_sweep_endpoints(std::string& detail) {
    const auto config = load_scenario_config(kConfigs + "/demo.json");
    const auto scenario = generate_scenario(config);
    if (scenario.drivers.size() != 5 || scenario.passengers.size() != 13) {
        detail = "demo scenario is not the 5-driver/13-passenger instance";
        return false;
    }

    // models on the full labeled data; profiles from per-driver segments
    std::vector<BoostedModel> models;
    for (const auto& passenger : scenario.passengers) {
        models.push_back(train_comfort_model(passenger.labeled, GbdtParams{},
                                             class_weights(passenger.labeled),
                                             passenger.epsilon));
    }
    std::vector<DriverProfile> profiles;
    for (const auto& driver : scenario.drivers) {
        profiles.push_back(build_profile(driver.id, driver.segments, 0.05, 0.95));
    }

    MatchInstance inst;
    inst.passenger_pos = scenario.passenger_positions;
    inst.driver_pos = scenario.driver_positions;
    for (const auto& p : scenario.passengers) inst.passenger_ids.push_back(p.id);
    for (const auto& d : scenario.drivers) inst.driver_ids.push_back(d.id);
    inst.compatibility.assign(models.size(), std::vector<double>(profiles.size(), 0.0));
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = 0; j < profiles.size(); ++j) {
            McParams mc;
            mc.samples = 50'000;
            mc.seed = derive_seed(42, i * profiles.size() + j);
            inst.compatibility[i][j] =
                compatibility_auto(models[i], profiles[j].zone, scenario.domain,
                                   kDefaultCellBudget, mc)
                    .value;
        }
    }
    inst.distance = euclidean_distance_matrix(inst.passenger_pos, inst.driver_pos);

    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(0.1 * k);
    const auto records = alpha_sweep(inst, grid);

    const bool endpoint0 = records.front().jaccard_vs_distance == 1.0;
    const bool endpoint1 = records.back().jaccard_vs_comfort == 1.0;
    bool monotone = true;
    for (std::size_t k = 1; k < records.size(); ++k) {
        if (records[k].total_compatibility < records[k - 1].total_compatibility - 1e-12 ||
            records[k].total_distance < records[k - 1].total_distance - 1e-12) {
            monotone = false;
        }
    }
    std::ostringstream ss;
    ss << "5x13 demo: jaccard(alpha=0 vs distance baseline)="
       << records.front().jaccard_vs_distance
       << ", jaccard(alpha=1 vs comfort baseline)=" << records.back().jaccard_vs_comfort
       << ", totals monotone=" << (monotone ? "yes" : "no");
    detail = ss.str();
    return endpoint0 && endpoint1 && monotone;
}

// ---------------------------------------------------------------------------
// 6. GNB correction restores planted flips and is idempotent

bool criterion_gnb_correction(std::string& detail) {
    const auto data = oracles::make_two_clusters(1000, kFeatureCount, 5.0, 0.05, 31337);
    const auto corrected = gnb_label_correction(data.noisy);

    std::size_t restored = 0;
    for (std::size_t idx : data.flipped_rows) {
        restored += corrected.rows[idx].label == data.clean_labels[idx];
    }
    const auto twice = gnb_label_correction(corrected);
    std::size_t second_pass_changes = 0;
    for (std::size_t i = 0; i < corrected.rows.size(); ++i) {
        second_pass_changes += twice.rows[i].label != corrected.rows[i].label;
    }
    const double restored_frac =
        static_cast<double>(restored) / static_cast<double>(data.flipped_rows.size());
    std::ostringstream ss;
    ss << restored << "/" << data.flipped_rows.size() << " planted flips restored ("
       << restored_frac << ", need >= 0.95); second pass changed " << second_pass_changes
       << " labels";
    detail = ss.str();
    return restored_frac >= 0.95 && second_pass_changes == 0;
}

// ---------------------------------------------------------------------------
// 7. byte-identical outputs for identical configs through the CLI

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
}

bool criterion_determinism(std::string& detail) {
    const fs::path base = "acceptance_tmp";
    fs::remove_all(base);
    fs::create_directories(base);

    for (const std::string run : {"run1", "run2"}) {
        const fs::path out = base / run;
        const fs::path log = base / (run + ".log");
        if (run_cli("gen --config " + kConfigs + "/determinism.json --out " + out.string(), log) !=
            0) {
            detail = "gen failed, see " + log.string();
            return false;
        }
        if (run_cli("features --trace " + (out / "traces" / "da_s0.csv").string() + " --out " +
                        (out / "features_da.csv").string(),
                    log) != 0) {
            detail = "features failed";
            return false;
        }
        if (run_cli("train --data " + (out / "segments" / "passengers").string() + " --out " +
                        out.string() + " --epsilon-map " + (out / "epsilons.json").string() +
                        " --seed 5",
                    log) != 0) {
            detail = "train failed";
            return false;
        }
        if (run_cli("profile --data " + (out / "segments" / "drivers").string() + " --out " +
                        (out / "profiles.json").string(),
                    log) != 0) {
            detail = "profile failed";
            return false;
        }
        if (run_cli("score --models " + (out / "models").string() + " --profiles " +
                        (out / "profiles.json").string() + " --domain " +
                        (out / "domain.json").string() + " --seed 5 --mc-samples 20000 --out " +
                        out.string(),
                    log) != 0) {
            detail = "score failed";
            return false;
        }
        if (run_cli("match --instance " + (out / "positions.json").string() + " --scores " +
                        (out / "scores.json").string() + " --alpha 0,0.5,1 --out " +
                        (out / "match").string(),
                    log) != 0) {
            detail = "match failed";
            return false;
        }
    }

    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "run1")) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const fs::path rel = fs::relative(entry.path(), base / "run1");
        const fs::path other = base / "run2" / rel;
        if (!fs::exists(other)) {
            detail = "missing in run2: " + rel.string();
            return false;
        }
        std::ifstream a(entry.path(), std::ios::binary), b(other, std::ios::binary);
        std::ostringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (sa.str() != sb.str()) {
            detail = "byte mismatch in " + rel.string();
            return false;
        }
    }
    std::ostringstream ss;
    ss << files << " files byte-identical across two gen->features->train->match runs";
    detail = ss.str();
    return files > 0;
}

// ---------------------------------------------------------------------------
// 8. matching complexity smoke check

bool criterion_complexity(std::string& detail) {
    std::mt19937_64 rng(60);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t sizes[] = {50, 100, 200};
    double best[3] = {1e300, 1e300, 1e300};
    for (int rep = 0; rep < 5; ++rep) {
        for (int s = 0; s < 3; ++s) {
            const std::size_t n = sizes[s];
            MatchInstance inst;
            inst.passenger_ids.resize(n);
            inst.driver_ids.resize(n);
            inst.passenger_pos.resize(n);
            inst.driver_pos.resize(n);
            inst.compatibility.assign(n, std::vector<double>(n, 0.0));
            inst.distance.assign(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    inst.compatibility[i][j] = unit(rng);
                    inst.distance[i][j] = 10.0 * unit(rng);
                }
            }
            const auto start = std::chrono::steady_clock::now();
            const Assignment assignment = solve(inst, 0.5);
            const double seconds = elapsed_s(start);
            best[s] = std::min(best[s], seconds);
            if (assignment.pairs.size() != n) {
                detail = "infeasible assignment";
                return false;
            }
        }
    }

    // cubic growth predicts an 8x step per doubling; allow 3x slack for noise
    const double r1 = best[1] / best[0];
    const double r2 = best[2] / best[1];
    std::ostringstream ss;
    ss << "t(50)=" << best[0] << "s t(100)=" << best[1] << "s t(200)=" << best[2]
       << "s, ratios " << r1 << ", " << r2 << " (cap 24); t(200) cap 2s";
    detail = ss.str();
    return best[2] < 2.0 && r1 <= 24.0 && r2 <= 24.0;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"assignment optimality vs exhaustive oracle", criterion_assignment_optimality},
        {"intersection-volume exactness and MC error", criterion_volume_exactness},
        {"region extraction fidelity", criterion_region_fidelity},
        {"pipeline recoverability on the synthetic scenario", criterion_pipeline_recoverability},
        {"alpha-sweep endpoint behavior", criterion_sweep_endpoints},
        {"gaussian label correction", criterion_gnb_correction},
        {"pipeline determinism (byte-identical reruns)", criterion_determinism},
        {"matching complexity smoke check", criterion_complexity},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[k].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << (k + 1) << ". " << criteria[k].name << " — "
                  << detail << "\n";
        if (!ok) ++failures;
    }
    std::cout << (failures == 0 ? "acceptance: all criteria passed"
                                : "acceptance: " + std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
