#include "doctest.h"

#include <cmath>

#include "nodebias/analysis.hpp"
#include "nodebias/errors.hpp"
#include "nodebias/rng.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace nodebias;

namespace {

// label 1 iff x > threshold
Network threshold_net(double threshold = 0.0) {
    Network net;
    net.input_dim = 1;
    net.class_count = 2;
    Layer layer;
    layer.weights = {{0.0}, {1.0}};
    layer.bias = {threshold, 0.0};
    layer.activation = Activation::identity;
    net.layers.push_back(layer);
    return net;
}

Dataset one_feature_test() {
    Dataset ds;
    ds.feature_names = {"x"};
    ds.class_names = {"lo", "hi"};
    ds.rows = {{"a", {0.15}, 1}, {"b", {5.0}, 1}};
    return ds;
}

RunSet runset_of(std::vector<Network> nets, const Dataset& test) {
    RunSet runs;
    runs.dataset_fingerprint = "fixture";
    for (size_t i = 0; i < nets.size(); ++i) {
        RunEntry entry;
        entry.seed = i;
        entry.validation = validate_model(nets[i], test);
        entry.network = std::move(nets[i]);
        runs.entries.push_back(std::move(entry));
    }
    return runs;
}

SweepSettings settings_of(double step, int max_level) {
    SweepSettings s;
    s.step = step;
    s.max_level = max_level;
    return s;
}

SensitivityCurve curve_from_values(const std::vector<std::vector<double>>& per_class_levels,
                                   double step = 0.05) {
    SensitivityCurve curve;
    curve.step = step;
    curve.class_names = {"a", "b"};
    const size_t levels = per_class_levels.front().size();
    for (size_t t = 0; t < levels; ++t) {
        CurvePoint point;
        point.level = static_cast<int>(t + 1);
        point.magnitude = step * static_cast<double>(t + 1);
        for (const auto& cls : per_class_levels) {
            ClassPoint cp;
            cp.present = true;
            cp.mean = Ratio(static_cast<int128>(std::llround(cls[t] * 1000)), 1000);
            cp.probability = cp.mean.value();
            cp.per_network = {cp.mean};
            cp.seed_count = 1;
            point.classes.push_back(std::move(cp));
        }
        curve.points.push_back(std::move(point));
    }
    return curve;
}

BiasReport report_with_class_curve(const SensitivityCurve& curve) {
    BiasReport report;
    report.test_fingerprint = "test-fp";
    report.class_curve = curve;
    report.class_curve_polarity = curve.polarity;
    report.scores = {bias_score(curve)};
    return report;
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("hand aggregation fixture: per-seed ratios 1/2 and 1 average to 0.75") {
    const Dataset test = one_feature_test();
    const RunSet runs = runset_of({threshold_net()}, test);
    const SensitivityCurve curve =
        class_robustness_curve(runs, test, Polarity::negative, settings_of(0.1, 2));

    // level 2 offsets -0.1, -0.2: seed a preserves 1 of 2, seed b 2 of 2
    const ClassPoint& hi = curve.points[1].classes[1];
    REQUIRE(hi.present);
    CHECK(hi.mean == Ratio(3, 4));
    CHECK(hi.probability == 0.75);
    CHECK(hi.seed_count == 2);

    // class "lo" has no test seeds at all: absent, not zero
    CHECK_FALSE(curve.points[1].classes[0].present);
}

TEST_CASE("cross-network mean is a mean of per-network means") {
    const Dataset test = one_feature_test();
    // second net misclassifies seed a, so its class mean uses only seed b
    const RunSet runs = runset_of({threshold_net(0.0), threshold_net(0.2)}, test);
    const SensitivityCurve curve =
        class_robustness_curve(runs, test, Polarity::negative, settings_of(0.1, 2));

    const ClassPoint& hi = curve.points[1].classes[1];
    REQUIRE(hi.present);
    // net 0: (1 + 2)/4 = 3/4 over two seeds; net 1: 2/2 = 1 over one seed
    REQUIRE(hi.per_network[0].has_value());
    REQUIRE(hi.per_network[1].has_value());
    CHECK(*hi.per_network[0] == Ratio(3, 4));
    CHECK(*hi.per_network[1] == Ratio(1, 1));
    CHECK(hi.mean == Ratio(7, 8)); // not the pooled 5/6
    CHECK(hi.seed_count == 3);
}

TEST_CASE("aggregation conservation: the stored mean is recomputable from retained ratios") {
    SplitMix64 rng(71);
    const Dataset test = testutil::random_dataset(rng, 10, 3, 2);
    const RunSet runs = runset_of({testutil::random_network(rng, 3, 5, 2),
                                   testutil::random_network(rng, 3, 5, 2),
                                   testutil::random_network(rng, 3, 5, 2)},
                                  test);
    const SensitivityCurve curve =
        class_robustness_curve(runs, test, Polarity::symmetric, settings_of(0.2, 3));
    for (const CurvePoint& point : curve.points) {
        for (const ClassPoint& cp : point.classes) {
            if (!cp.present) continue;
            Ratio sum;
            int networks = 0;
            for (const auto& r : cp.per_network) {
                if (!r) continue;
                sum = sum + *r;
                ++networks;
            }
            CHECK(cp.mean == sum * Ratio(1, networks));
            CHECK(cp.probability == cp.mean.value());
            CHECK(cp.probability >= 0.0);
            CHECK(cp.probability <= 1.0);
        }
    }
}

TEST_CASE("constant-output network preserves everything") {
    Network net;
    net.input_dim = 2;
    net.class_count = 2;
    Layer layer;
    layer.weights = {{0.0, 0.0}, {0.0, 0.0}};
    layer.bias = {1.0, 0.0};
    layer.activation = Activation::identity;
    net.layers.push_back(layer);

    Dataset test;
    test.feature_names = {"x", "y"};
    test.class_names = {"always", "never"};
    test.rows = {{"a", {0.3, -0.4}, 0}, {"b", {-2.0, 1.0}, 0}};

    const RunSet runs = runset_of({net}, test);
    const SensitivityCurve curve =
        class_robustness_curve(runs, test, Polarity::symmetric, settings_of(0.5, 4));
    for (const CurvePoint& point : curve.points) {
        REQUIRE(point.classes[0].present);
        CHECK(point.classes[0].probability == 1.0);
        CHECK_FALSE(point.classes[1].present);
    }
}

TEST_CASE("node curves: dead nodes stay at probability one") {
    SplitMix64 rng(72);
    Network net = testutil::random_network(rng, 3, 5, 2);
    for (auto& row : net.layers[0].weights) row[2] = 0.0; // node 2 is dead

    const Dataset test = testutil::random_dataset(rng, 8, 3, 2);
    const RunSet runs = runset_of({net}, test);
    const auto curves =
        node_sensitivity_curves(runs, test, Polarity::negative, settings_of(0.1, 5));
    REQUIRE(curves.size() == 3);
    CHECK(curves[2].target.node == 2);
    for (const CurvePoint& point : curves[2].points) {
        for (const ClassPoint& cp : point.classes) {
            if (cp.present) CHECK(cp.probability == 1.0);
        }
    }
}

TEST_CASE("node curves on the threshold fixture drop immediately under negative noise") {
    const Dataset test = one_feature_test();
    const RunSet runs = runset_of({threshold_net()}, test);
    const auto curves =
        node_sensitivity_curves(runs, test, Polarity::negative, settings_of(0.2, 3));
    REQUIRE(curves.size() == 1);
    // seed a (0.15) flips already at -0.2; seed b (5.0) never flips
    const ClassPoint& level1 = curves[0].points[0].classes[1];
    REQUIRE(level1.present);
    CHECK(level1.mean == Ratio(1, 2));
}

TEST_CASE("permuting input nodes permutes the node curves") {
    SplitMix64 rng(73);
    const Network net = testutil::random_network(rng, 3, 4, 2);
    const Dataset test = testutil::random_dataset(rng, 6, 3, 2);

    const std::vector<size_t> perm = {1, 2, 0};
    Network permuted = net;
    for (size_t r = 0; r < net.layers[0].weights.size(); ++r) {
        for (size_t c = 0; c < 3; ++c) {
            permuted.layers[0].weights[r][c] = net.layers[0].weights[r][perm[c]];
        }
    }
    Dataset ptest = test;
    for (size_t i = 0; i < test.rows.size(); ++i) {
        for (size_t c = 0; c < 3; ++c)
            ptest.rows[i].features[c] = test.rows[i].features[perm[c]];
    }

    const SweepSettings settings = settings_of(0.15, 3);
    const auto original =
        node_sensitivity_curves(runset_of({net}, test), test, Polarity::positive, settings);
    const auto moved =
        node_sensitivity_curves(runset_of({permuted}, ptest), ptest, Polarity::positive, settings);
    for (size_t c = 0; c < 3; ++c) {
        for (size_t p = 0; p < 3; ++p) {
            for (size_t cls = 0; cls < 2; ++cls) {
                const ClassPoint& a = original[perm[c]].points[p].classes[cls];
                const ClassPoint& b = moved[c].points[p].classes[cls];
                CHECK(a.present == b.present);
                if (a.present) CHECK(a.mean == b.mean);
            }
        }
    }
}

TEST_CASE("bias scores") {
    SUBCASE("identical class curves score zero") {
        const SensitivityCurve curve = curve_from_values({{1.0, 0.9, 0.8}, {1.0, 0.9, 0.8}});
        const BiasScore score = bias_score(curve);
        CHECK(score.score == 0.0);
        CHECK(score.gap_area == 0.0);
    }
    SUBCASE("constant 1.0 against a drop to 0.2 scores 0.8 at the last level") {
        const SensitivityCurve curve =
            curve_from_values({{1.0, 1.0, 1.0, 1.0}, {0.9, 0.7, 0.4, 0.2}});
        const BiasScore score = bias_score(curve);
        CHECK(score.score == doctest::Approx(0.8));
        CHECK(score.arg_level == 4);
    }
    SUBCASE("ties resolve to the lowest level") {
        const SensitivityCurve curve = curve_from_values({{1.0, 1.0, 1.0}, {0.5, 0.5, 0.9}});
        CHECK(bias_score(curve).arg_level == 1);
    }
    SUBCASE("matches an independent max scan on random curves") {
        SplitMix64 rng(74);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::vector<double>> values(2, std::vector<double>(5));
            for (auto& cls : values) {
                for (double& v : cls) v = std::round(rng.next_double() * 100.0) / 100.0;
            }
            const BiasScore score = bias_score(curve_from_values(values));
            double best = 0.0;
            int best_level = 0;
            for (size_t t = 0; t < 5; ++t) {
                const double gap = std::abs(values[0][t] - values[1][t]);
                if (gap > best + 1e-15) {
                    best = gap;
                    best_level = static_cast<int>(t + 1);
                }
            }
            CHECK(score.score == doctest::Approx(best).epsilon(1e-12));
            if (best > 0.0) CHECK(score.arg_level == best_level);
        }
    }
    SUBCASE("rejects single-class curves") {
        SensitivityCurve curve;
        curve.class_names = {"only"};
        CHECK_THROWS_AS(static_cast<void>(bias_score(curve)), data_error);
    }
}

TEST_CASE("variance table flags per-class extrema") {
    Dataset ds;
    ds.feature_names = {"f1", "f2", "f3"};
    ds.class_names = {"a", "b"};
    // class a variances: f1 = 2, f2 = 0.5, f3 = 8  -> min f2, max f3
    // class b variances: f1 = 18, f2 = 2, f3 = 0.5 -> min f3, max f1
    ds.rows = {{"1", {1.0, 0.5, 2.0}, 0},  {"2", {3.0, 1.5, 6.0}, 0},
               {"3", {0.0, 0.0, 9.0}, 1},  {"4", {6.0, 2.0, 10.0}, 1}};
    const VarianceTable table = variance_table(ds);
    CHECK(*table.cells[0][0].variance == doctest::Approx(2.0));
    CHECK(table.cells[0][1].is_class_min);
    CHECK(table.cells[0][2].is_class_max);
    CHECK(table.cells[1][0].is_class_max);
    CHECK(table.cells[1][2].is_class_min);
    CHECK_FALSE(table.cells[0][0].is_class_min);
    CHECK_FALSE(table.cells[0][0].is_class_max);
}

TEST_CASE("variance table requires more than one class") {
    Dataset ds;
    ds.feature_names = {"x"};
    ds.class_names = {"only"};
    ds.rows = {{"1", {1.0}, 0}, {"2", {2.0}, 0}};
    CHECK_THROWS_AS(static_cast<void>(variance_table(ds)), data_error);
}

TEST_CASE("variance table agrees with the two-pass oracle") {
    SplitMix64 rng(75);
    const Dataset ds = testutil::random_dataset(rng, 40, 5, 2);
    const VarianceTable table = variance_table(ds);
    for (size_t c = 0; c < 2; ++c) {
        for (size_t f = 0; f < 5; ++f) {
            std::vector<double> values;
            for (const DataRow& row : ds.rows) {
                if (static_cast<size_t>(row.label) == c) values.push_back(row.features[f]);
            }
            REQUIRE(table.cells[c][f].variance.has_value());
            CHECK(*table.cells[c][f].variance ==
                  doctest::Approx(oracle::two_pass_variance(values)).epsilon(1e-9));
        }
    }
}

TEST_CASE("compare_regimes of a report with itself is identically zero") {
    const BiasReport report =
        report_with_class_curve(curve_from_values({{1.0, 0.9}, {0.8, 0.6}}));
    const RegimeComparison cmp = compare_regimes(report, report);
    REQUIRE(cmp.curves.size() == 1);
    CHECK(cmp.curves[0].score_delta == 0.0);
    for (const auto& level : cmp.curves[0].levels) {
        CHECK_FALSE(level.flip);
        for (const auto& d : level.delta) {
            REQUIRE(d.has_value());
            CHECK(*d == 0.0);
        }
    }
}

TEST_CASE("compare_regimes flags a crossover of the weakest class") {
    const BiasReport full =
        report_with_class_curve(curve_from_values({{1.0, 1.0}, {0.9, 0.5}}));
    const BiasReport truncated =
        report_with_class_curve(curve_from_values({{0.9, 0.4}, {1.0, 0.9}}));
    const RegimeComparison cmp = compare_regimes(full, truncated);
    const auto& levels = cmp.curves[0].levels;
    REQUIRE(levels.size() == 2);
    CHECK(levels[1].low_class_full == 1);
    CHECK(levels[1].low_class_truncated == 0);
    CHECK(levels[1].flip);
    CHECK(*levels[1].delta[0] == doctest::Approx(-0.6));
    CHECK(*levels[1].delta[1] == doctest::Approx(0.4));
}

TEST_CASE("compare_regimes rejects mismatched configurations") {
    BiasReport full = report_with_class_curve(curve_from_values({{1.0}, {0.9}}));
    BiasReport truncated = full;
    truncated.sweep.step = full.sweep.step * 2;
    CHECK_THROWS_AS(static_cast<void>(compare_regimes(full, truncated)), data_error);

    BiasReport other_test = full;
    other_test.test_fingerprint = "different";
    CHECK_THROWS_AS(static_cast<void>(compare_regimes(full, other_test)), data_error);
}

} // TEST_SUITE
