#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nodebias/data.hpp"
#include "nodebias/perturb.hpp"
#include "nodebias/ratio.hpp"
#include "nodebias/train.hpp"

namespace nodebias {

struct SweepSettings {
    double step = 0.05;
    int max_level = 10;
    uint64_t budget = kDefaultBudget;
    uint64_t mc_samples = kDefaultMcSamples;
    uint64_t mc_seed = 0;
};

// One (curve, level, class) cell. `mean` is the cross-network mean of the
// per-network means; the per-network layer is retained so every emitted
// probability can be recomputed from integer counts.
struct ClassPoint {
    bool present = false;
    Ratio mean;
    double probability = 0.0;
    long seed_count = 0; // contributing (network, seed) pairs
    std::vector<std::optional<Ratio>> per_network;
};

struct CurvePoint {
    int level = 0;
    double magnitude = 0.0;
    PreserveMethod method = PreserveMethod::exact;
    std::vector<ClassPoint> classes;
};

struct SensitivityCurve {
    SweepTarget target;
    Polarity polarity = Polarity::symmetric;
    double step = 0.05;
    std::vector<std::string> class_names;
    std::vector<CurvePoint> points; // levels strictly increasing, 1..max_level
};

struct BiasScore {
    SweepTarget target;
    Polarity polarity = Polarity::symmetric;
    double score = 0.0; // max over levels of the max pairwise class gap
    int arg_level = 0;  // lowest level attaining the max; 0 when undefined
    double gap_area = 0.0; // secondary: sum of per-level max gaps * step
};

struct VarianceTable {
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    struct Cell {
        size_t count = 0;
        std::optional<double> variance;
        bool is_class_min = false;
        bool is_class_max = false;
    };
    std::vector<std::vector<Cell>> cells; // [class][feature]
};

struct BiasReport {
    std::string regime;
    std::string train_fingerprint;
    std::string test_fingerprint;
    SweepSettings sweep;
    Polarity class_curve_polarity = Polarity::symmetric;
    std::vector<Polarity> node_polarities;
    std::vector<uint64_t> training_seeds;
    SensitivityCurve class_curve;
    std::vector<SensitivityCurve> node_curves; // node-major, then polarity
    std::vector<BiasScore> scores;             // class curve first, then node curves
    VarianceTable variance;
    std::vector<ValidationSummary> validations; // aligned with training_seeds
};

struct RegimeComparison {
    struct LevelEntry {
        int level = 0;
        double magnitude = 0.0;
        // Per class: truncated minus full, absent when either side is absent.
        std::vector<std::optional<double>> delta;
        std::optional<int> low_class_full;
        std::optional<int> low_class_truncated;
        bool flip = false; // the lower-probability class differs between regimes
    };
    struct CurveEntry {
        SweepTarget target;
        Polarity polarity = Polarity::symmetric;
        std::vector<LevelEntry> levels;
        double score_delta = 0.0;
    };
    std::vector<CurveEntry> curves;
};

// All-nodes preservation curve: per network, per correctly classified seed,
// per level; class means within a network, then means across networks.
SensitivityCurve class_robustness_curve(const RunSet& runs, const Dataset& test_normalized,
                                        Polarity polarity, const SweepSettings& settings);

// Single-node curves for every input node at the given polarity.
std::vector<SensitivityCurve> node_sensitivity_curves(const RunSet& runs,
                                                      const Dataset& test_normalized,
                                                      Polarity polarity,
                                                      const SweepSettings& settings);

std::vector<BiasScore> bias_scores(const std::vector<SensitivityCurve>& curves);
BiasScore bias_score(const SensitivityCurve& curve);

// Unbiased per-(node, class) variance of raw training values with per-class
// extrema flags.
VarianceTable variance_table(const Dataset& train_raw);

RegimeComparison compare_regimes(const BiasReport& full, const BiasReport& truncated);

} // namespace nodebias
