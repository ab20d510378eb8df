#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "ridematch/comfort_model.hpp"

using namespace ridematch;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

Tree single_split(int feature, double threshold, double left_val, double right_val) {
    Tree t;
    t.nodes.push_back({feature, threshold, 1, 2, 0.0});
    t.nodes.push_back({-1, 0.0, -1, -1, left_val});
    t.nodes.push_back({-1, 0.0, -1, -1, right_val});
    return t;
}

BoostedModel hand_model(std::size_t feature_count, std::vector<Tree> trees, double epsilon) {
    BoostedModel m;
    m.feature_count = feature_count;
    m.trees = std::move(trees);
    m.base_score = 0.0;
    m.epsilon = epsilon;
    m.params.learning_rate = 1.0;
    return m;
}

LabeledDataset separable_1d(std::size_t n_per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> neg(-1.0, -0.01), pos(0.01, 1.0);
    LabeledDataset data;
    for (std::size_t i = 0; i < n_per_class; ++i) {
        SegmentFeatures a;
        a.values = {neg(rng)};
        a.label = 0;
        data.rows.push_back(a);
        SegmentFeatures b;
        b.values = {pos(rng)};
        b.label = 1;
        data.rows.push_back(b);
    }
    return data;
}

// noisy axis-aligned concept in the unit square
LabeledDataset boxy_2d(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LabeledDataset data;
    const double a = 0.3 + 0.4 * unit(rng);
    const double b = 0.3 + 0.4 * unit(rng);
    for (std::size_t i = 0; i < n; ++i) {
        SegmentFeatures row;
        row.values = {unit(rng), unit(rng)};
        row.label = (row.values[0] > a && row.values[1] < b) ? 1 : 0;
        if (unit(rng) < 0.05) row.label = 1 - row.label;
        data.rows.push_back(row);
    }
    // make sure both classes exist
    data.rows[0].label = 0;
    data.rows[1].label = 1;
    return data;
}

}  // namespace

TEST_SUITE("comfort_model") {

TEST_CASE("score of the empty ensemble is sigmoid of the base score") {
    const auto m = hand_model(3, {}, 0.5);
    const std::vector<double> x{0.0, 5.0, -2.0};
    CHECK(score(m, x) == 0.5);
    CHECK_THROWS_AS(score(m, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("classification threshold is inclusive") {
    auto m = hand_model(1, {}, 0.5);
    const std::vector<double> x{0.0};
    CHECK(score(m, x) == 0.5);
    CHECK(classify(m, x) == 1);  // score == epsilon counts as uncomfortable

    m.epsilon = 0.5000001;
    CHECK(classify(m, x) == 0);
    m.epsilon = 1.0 - 1e-12;
    CHECK(classify(m, x) == 0);
    m.epsilon = 1e-12;
    CHECK(classify(m, x) == 1);
}

TEST_CASE("hand-built monotone model scores monotonically") {
    const auto m =
        hand_model(1, {single_split(0, 0.0, -1.0, 1.0), single_split(0, 0.5, -0.5, 2.0)}, 0.5);
    double prev = 0.0;
    for (double x = -2.0; x <= 2.0; x += 0.01) {
        const double s = score(m, std::vector<double>{x});
        if (x > -2.0) CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("training separates a linearly separable problem") {
    const auto data = separable_1d(100, 99);
    GbdtParams params;
    params.n_trees = 20;
    params.max_depth = 2;
    params.learning_rate = 0.3;
    params.min_child_weight = 1e-3;
    const auto model = train_comfort_model(data, params, {1.0, 1.0}, 0.5);

    std::size_t correct = 0;
    for (const auto& row : data.rows) {
        if (classify(model, row.values) == row.label) ++correct;
        if (row.label == 1) CHECK(score(model, row.values) > 0.9);
    }
    CHECK(correct == data.rows.size());
}

TEST_CASE("training rejects bad input") {
    LabeledDataset single;
    SegmentFeatures row;
    row.values = {1.0};
    row.label = 0;
    single.rows.push_back(row);
    single.rows.push_back(row);
    CHECK_THROWS_AS(train_comfort_model(single, {}, {1, 1}, 0.5), std::invalid_argument);

    auto data = separable_1d(5, 1);
    data.rows[0].values[0] = std::nan("");
    CHECK_THROWS_AS(train_comfort_model(data, {}, {1, 1}, 0.5), std::invalid_argument);

    auto unlabeled = separable_1d(5, 1);
    unlabeled.rows[0].label = kUnlabeled;
    CHECK_THROWS_AS(train_comfort_model(unlabeled, {}, {1, 1}, 0.5), std::invalid_argument);

    CHECK_THROWS_AS(train_comfort_model(separable_1d(5, 1), {}, {1, 1}, 1.5),
                    std::invalid_argument);
}

TEST_CASE("weighted training loss is non-increasing per tree") {
    const auto data = boxy_2d(300, 17);
    const auto weights = class_weights(data);
    GbdtParams params;
    params.n_trees = 30;
    params.learning_rate = 0.2;
    const auto model = train_comfort_model(data, params, weights, 0.5);

    double prev = weighted_logistic_loss(model, data, 0);
    for (std::size_t t = 1; t <= model.trees.size(); ++t) {
        const double cur = weighted_logistic_loss(model, data, t);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }
}

TEST_CASE("region of the empty ensemble covers the whole domain") {
    auto m = hand_model(2, {}, 0.6);  // score 0.5 everywhere, below epsilon
    const BoundingDomain domain(HyperRect({0, 0}, {2, 3}));
    const auto region = extract_region(m, domain);
    REQUIRE(region.region.boxes.size() == 1);
    CHECK(region.region.boxes[0].lo == domain.bounds.lo);
    CHECK(region.region.boxes[0].hi == domain.bounds.hi);

    m.epsilon = 0.4;  // now nothing is comfortable
    CHECK(extract_region(m, domain).region.boxes.empty());
}

TEST_CASE("region of a single split stops at the threshold") {
    const auto m = hand_model(1, {single_split(0, 0.25, logit(0.2), logit(0.8))}, 0.5);
    const BoundingDomain domain(HyperRect({0}, {1}));
    const auto region = extract_region(m, domain);
    REQUIRE(region.region.boxes.size() == 1);
    CHECK(region.region.boxes[0].lo[0] == 0.0);
    CHECK(region.region.boxes[0].hi[0] == 0.25);
}

TEST_CASE("staircase model yields a multi-box region that tracks the score") {
    const auto m =
        hand_model(2, {single_split(0, 1.0, -2.0, 1.0), single_split(1, 1.0, -2.0, 1.0)}, 0.5);
    const BoundingDomain domain(HyperRect({0, 0}, {2, 2}));
    const auto region = extract_region(m, domain);
    CHECK(region.region.boxes.size() == 2);  // L-shape cannot be one box

    // membership sampling against the score
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    for (int i = 0; i < 10'000; ++i) {
        const std::vector<double> x{unit(rng), unit(rng)};
        CHECK(region.region.contains(x) == (score(m, x) < m.epsilon));
    }

    // boxes are interior-disjoint
    for (std::size_t i = 0; i < region.region.boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < region.region.boxes.size(); ++j) {
            CHECK(intersect_volume(region.region.boxes[i], region.region.boxes[j]) == 0.0);
        }
    }
}

TEST_CASE("cell budget overflow raises a quantified error") {
    std::vector<Tree> trees;
    for (int d = 0; d < 3; ++d) {
        for (int k = 1; k <= 10; ++k) {
            trees.push_back(single_split(d, 0.05 + 0.09 * k, -0.1, 0.1));
        }
    }
    const auto m = hand_model(3, std::move(trees), 0.5);
    const BoundingDomain domain(HyperRect({0, 0, 0}, {1, 1, 1}));
    try {
        extract_region(m, domain, 1000);
        FAIL("expected CellBudgetExceeded");
    } catch (const CellBudgetExceeded& e) {
        CHECK(e.cell_count == 11.0 * 11.0 * 11.0);
        CHECK(e.budget == 1000);
    }
    CHECK_NOTHROW(extract_region(m, domain, 2000));
}

TEST_CASE("extracted regions agree with the score on trained models") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unit(-0.1, 1.1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = boxy_2d(300, 1000 + trial);
        GbdtParams params;
        params.n_trees = 20;
        params.learning_rate = 0.25;
        const auto model = train_comfort_model(data, params, class_weights(data), 0.5);
        const BoundingDomain domain(HyperRect({-0.1, -0.1}, {1.1, 1.1}));
        const auto region = extract_region(model, domain);

        std::vector<std::vector<double>> thresholds(2);
        for (const auto& tree : model.trees) tree.collect_thresholds(thresholds);

        for (int i = 0; i < 10'000; ++i) {
            const std::vector<double> x{unit(rng), unit(rng)};
            const bool member = region.region.contains(x);
            const bool comfortable = score(model, x) < model.epsilon;
            if (member != comfortable) {
                double min_dist = 1e300;
                for (std::size_t d = 0; d < 2; ++d) {
                    for (double t : thresholds[d]) {
                        min_dist = std::min(min_dist, std::abs(x[d] - t));
                    }
                }
                CHECK(min_dist <= 1e-9);
            }
        }
    }
}

TEST_CASE("larger epsilon gives a larger region") {
    const auto data = boxy_2d(300, 3000);
    GbdtParams params;
    params.n_trees = 15;
    auto tight = train_comfort_model(data, params, {1, 1}, 0.35);
    auto loose = tight;
    loose.epsilon = 0.65;

    const BoundingDomain domain(HyperRect({-0.1, -0.1}, {1.1, 1.1}));
    const auto region_tight = extract_region(tight, domain);
    const auto region_loose = extract_region(loose, domain);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-0.1, 1.1);
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> x{unit(rng), unit(rng)};
        if (region_tight.region.contains(x)) CHECK(region_loose.region.contains(x));
    }
}

TEST_CASE("compatibility of contained and disjoint zones") {
    const auto comfortable_everywhere = hand_model(2, {}, 0.6);
    const BoundingDomain domain(HyperRect({0, 0}, {2, 2}));
    const auto region = extract_region(comfortable_everywhere, domain);

    CHECK(compatibility(region, HyperRect({0.2, 0.2}, {0.8, 0.8})).value == 1.0);
    CHECK(compatibility(region, HyperRect({0.5, 0.5}, {0.5, 1.0})).value == 0.0);  // zero volume

    const auto m =
        hand_model(2, {single_split(0, 1.0, -2.0, 1.0), single_split(1, 1.0, -2.0, 1.0)}, 0.5);
    const auto stair = extract_region(m, domain);
    CHECK(compatibility(stair, HyperRect({1.2, 1.2}, {1.8, 1.8})).value == 0.0);
    CHECK(compatibility(stair, HyperRect({0.1, 0.1}, {0.9, 0.9})).value == 1.0);
}

TEST_CASE("exact and mc compatibility agree") {
    const auto m =
        hand_model(2, {single_split(0, 1.0, -2.0, 1.0), single_split(1, 1.0, -2.0, 1.0)}, 0.5);
    const BoundingDomain domain(HyperRect({0, 0}, {2, 2}));
    const HyperRect zone({0, 0}, {2, 2});

    const auto exact = compatibility(extract_region(m, domain), zone);
    CHECK(exact.value == doctest::Approx(0.75));
    CHECK(exact.std_error == 0.0);

    McParams mc;
    mc.samples = 1'000'000;
    mc.seed = 8;
    const auto approx = compatibility(m, zone, domain, mc);
    CHECK(approx.std_error > 0.0);
    CHECK(std::abs(approx.value - exact.value) <= 3.0 * approx.std_error);

    // same seed, same estimate
    const auto again = compatibility(m, zone, domain, mc);
    CHECK(again.value == approx.value);
}

TEST_CASE("compatibility_auto falls back to mc over budget") {
    const auto m =
        hand_model(2, {single_split(0, 1.0, -2.0, 1.0), single_split(1, 1.0, -2.0, 1.0)}, 0.5);
    const BoundingDomain domain(HyperRect({0, 0}, {2, 2}));
    const HyperRect zone({0, 0}, {2, 2});

    McParams mc;
    mc.samples = 200'000;
    mc.seed = 13;
    const auto exact = compatibility_auto(m, zone, domain, kDefaultCellBudget, mc);
    CHECK(exact.mode == CompatMode::exact);

    const auto fallback = compatibility_auto(m, zone, domain, 2, mc);
    CHECK(fallback.mode == CompatMode::mc);
    CHECK(std::abs(fallback.value - exact.value) <= 4.0 * fallback.std_error);
}

TEST_CASE("model json round trip preserves scores exactly") {
    const auto data = boxy_2d(200, 77);
    GbdtParams params;
    params.n_trees = 12;
    auto model = train_comfort_model(data, params, class_weights(data), 0.42);
    model.feature_names = {"f0", "f1"};

    const auto restored = model_from_json(model_to_json(model));

    const auto path = std::filesystem::path("comfort_model_roundtrip_tmp.json");
    save_model(path, model);
    const auto from_disk = load_model(path);
    std::filesystem::remove(path);

    CHECK(from_disk.epsilon == model.epsilon);
    CHECK(from_disk.feature_names == model.feature_names);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(-0.2, 1.2);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x{unit(rng), unit(rng)};
        const double s = score(model, x);
        CHECK(score(restored, x) == s);
        CHECK(score(from_disk, x) == s);
    }
}

}  // TEST_SUITE
