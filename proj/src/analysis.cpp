#include "nodebias/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "nodebias/errors.hpp"
#include "nodebias/util.hpp"

namespace nodebias {

namespace {

struct SeedCells {
    std::vector<SeedInput> seeds; // correctly classified only
    // counts[seed][level-1]
    std::vector<std::vector<PreservationCount>> counts;
};

// Computes per-(network, seed, level) preservation counts for one target and
// polarity. Work is spread over (network, seed) tasks; every task owns its
// output slot, so the parallel reduction is deterministic.
std::vector<SeedCells> compute_cells(const RunSet& runs, const Dataset& test,
                                     const SweepTarget& target, Polarity polarity,
                                     const SweepSettings& settings) {
    NoiseSweep sweep;
    sweep.step = settings.step;
    sweep.max_level = settings.max_level;
    sweep.polarity = polarity;
    sweep.target = target;

    std::vector<SeedCells> per_network(runs.entries.size());
    for (size_t j = 0; j < runs.entries.size(); ++j) {
        for (SeedInput& s : make_seed_inputs(runs.entries[j].network, test)) {
            if (s.correctly_classified) per_network[j].seeds.push_back(std::move(s));
        }
        per_network[j].counts.assign(per_network[j].seeds.size(), {});
    }

    std::vector<std::pair<size_t, size_t>> tasks; // (network, seed index)
    for (size_t j = 0; j < per_network.size(); ++j) {
        for (size_t s = 0; s < per_network[j].seeds.size(); ++s) tasks.emplace_back(j, s);
    }

    parallel_for(tasks.size(), [&](size_t t) {
        const auto [j, si] = tasks[t];
        const Network& net = runs.entries[j].network;
        const SeedInput& seed = per_network[j].seeds[si];
        auto& row = per_network[j].counts[si];
        row.resize(static_cast<size_t>(settings.max_level));
        for (int level = 1; level <= settings.max_level; ++level) {
            if (target.is_all()) {
                const AllNodesResult r =
                    preserve_all_nodes(net, seed, sweep, level, settings.budget,
                                       settings.mc_samples, settings.mc_seed);
                row[static_cast<size_t>(level - 1)] = r.count;
            } else {
                row[static_cast<size_t>(level - 1)] =
                    preserve_single_node(net, seed, target.node, sweep, level);
            }
        }
    });
    return per_network;
}

SensitivityCurve aggregate(const RunSet& runs, const Dataset& test, const SweepTarget& target,
                           Polarity polarity, const SweepSettings& settings) {
    const std::vector<SeedCells> cells = compute_cells(runs, test, target, polarity, settings);
    const size_t n_classes = test.class_names.size();
    const size_t n_networks = runs.entries.size();

    SensitivityCurve curve;
    curve.target = target;
    curve.polarity = polarity;
    curve.step = settings.step;
    curve.class_names = test.class_names;

    NoiseSweep sweep;
    sweep.step = settings.step;
    sweep.max_level = settings.max_level;
    sweep.polarity = polarity;
    sweep.target = target;

    for (int level = 1; level <= settings.max_level; ++level) {
        CurvePoint point;
        point.level = level;
        point.magnitude = static_cast<double>(level) * settings.step;
        point.method = (target.is_all() &&
                        joint_grid_size(sweep, level, test.feature_count(), settings.budget) >
                            settings.budget)
                           ? PreserveMethod::monte_carlo
                           : PreserveMethod::exact;
        point.classes.resize(n_classes);

        for (size_t c = 0; c < n_classes; ++c) {
            ClassPoint& cp = point.classes[c];
            cp.per_network.assign(n_networks, std::nullopt);
            Ratio sum_of_means;
            size_t networks_present = 0;
            for (size_t j = 0; j < n_networks; ++j) {
                uint64_t preserved = 0;
                uint64_t denom = 0;
                size_t seeds_in_class = 0;
                for (size_t si = 0; si < cells[j].seeds.size(); ++si) {
                    if (static_cast<size_t>(cells[j].seeds[si].class_label) != c) continue;
                    const PreservationCount& pc =
                        cells[j].counts[si][static_cast<size_t>(level - 1)];
                    preserved += pc.preserved;
                    denom += pc.total;
                    seeds_in_class += 1;
                }
                if (seeds_in_class == 0) continue;
                // Equal per-seed totals at a fixed level make the mean of the
                // per-seed ratios equal to the pooled ratio.
                cp.per_network[j] = Ratio::of_counts(preserved, denom);
                sum_of_means = sum_of_means + *cp.per_network[j];
                networks_present += 1;
                cp.seed_count += static_cast<long>(seeds_in_class);
            }
            if (networks_present > 0) {
                cp.present = true;
                cp.mean = sum_of_means * Ratio(1, static_cast<int128>(networks_present));
                cp.probability = cp.mean.value();
            }
        }
        curve.points.push_back(std::move(point));
    }
    return curve;
}

} // namespace

SensitivityCurve class_robustness_curve(const RunSet& runs, const Dataset& test_normalized,
                                        Polarity polarity, const SweepSettings& settings) {
    if (runs.entries.empty()) throw data_error("class_robustness_curve: empty run set");
    if (test_normalized.rows.empty()) throw data_error("class_robustness_curve: empty test set");
    return aggregate(runs, test_normalized, SweepTarget::all_nodes(), polarity, settings);
}

std::vector<SensitivityCurve> node_sensitivity_curves(const RunSet& runs,
                                                      const Dataset& test_normalized,
                                                      Polarity polarity,
                                                      const SweepSettings& settings) {
    if (polarity == Polarity::symmetric)
        throw config_error("node_sensitivity_curves: polarity must be positive or negative");
    if (runs.entries.empty()) throw data_error("node_sensitivity_curves: empty run set");
    std::vector<SensitivityCurve> curves;
    const size_t n = test_normalized.feature_count();
    curves.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        curves.push_back(aggregate(runs, test_normalized,
                                   SweepTarget::single_node(static_cast<int>(i)), polarity,
                                   settings));
    }
    return curves;
}

BiasScore bias_score(const SensitivityCurve& curve) {
    if (curve.class_names.size() < 2)
        throw data_error("bias_score: needs at least 2 classes");

    BiasScore score;
    score.target = curve.target;
    score.polarity = curve.polarity;
    Ratio best;
    for (const CurvePoint& point : curve.points) {
        Ratio level_gap;
        bool any_pair = false;
        for (size_t a = 0; a < point.classes.size(); ++a) {
            if (!point.classes[a].present) continue;
            for (size_t b = a + 1; b < point.classes.size(); ++b) {
                if (!point.classes[b].present) continue;
                const Ratio gap = (point.classes[a].mean - point.classes[b].mean).abs();
                if (!any_pair || level_gap < gap) level_gap = gap;
                any_pair = true;
            }
        }
        if (!any_pair) continue;
        score.gap_area += level_gap.value() * curve.step;
        if (score.arg_level == 0 || best < level_gap) {
            best = level_gap;
            score.arg_level = point.level;
        }
    }
    score.score = best.value();
    return score;
}

std::vector<BiasScore> bias_scores(const std::vector<SensitivityCurve>& curves) {
    std::vector<BiasScore> scores;
    scores.reserve(curves.size());
    for (const SensitivityCurve& c : curves) scores.push_back(bias_score(c));
    return scores;
}

VarianceTable variance_table(const Dataset& train_raw) {
    if (train_raw.class_names.size() < 2)
        throw data_error("variance_table: requires all classes, dataset has " +
                         std::to_string(train_raw.class_names.size()));
    const ClassStats stats = class_stats(train_raw);

    VarianceTable table;
    table.class_names = stats.class_names;
    table.feature_names = stats.feature_names;
    table.cells.assign(stats.class_names.size(),
                       std::vector<VarianceTable::Cell>(stats.feature_names.size()));

    for (size_t c = 0; c < stats.class_names.size(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (size_t f = 0; f < stats.feature_names.size(); ++f) {
            const auto& e = stats.cells[c][f];
            table.cells[c][f].count = e.count;
            table.cells[c][f].variance = e.variance;
            if (e.variance) {
                lo = std::min(lo, *e.variance);
                hi = std::max(hi, *e.variance);
            }
        }
        for (size_t f = 0; f < stats.feature_names.size(); ++f) {
            const auto& v = table.cells[c][f].variance;
            if (!v) continue;
            table.cells[c][f].is_class_min = (*v == lo);
            table.cells[c][f].is_class_max = (*v == hi);
        }
    }
    return table;
}

namespace {

std::optional<int> lowest_probability_class(const CurvePoint& point) {
    std::optional<int> low;
    size_t present = 0;
    for (size_t c = 0; c < point.classes.size(); ++c) {
        if (!point.classes[c].present) continue;
        present += 1;
        if (!low || point.classes[c].mean < point.classes[static_cast<size_t>(*low)].mean)
            low = static_cast<int>(c);
    }
    if (present < 2) return std::nullopt;
    return low;
}

const SensitivityCurve* find_curve(const BiasReport& report, const SweepTarget& target,
                                   Polarity polarity) {
    if (target.is_all() && polarity == report.class_curve_polarity) return &report.class_curve;
    for (const SensitivityCurve& c : report.node_curves) {
        if (c.target == target && c.polarity == polarity) return &c;
    }
    return nullptr;
}

double score_for(const BiasReport& report, const SweepTarget& target, Polarity polarity) {
    for (const BiasScore& s : report.scores) {
        if (s.target == target && s.polarity == polarity) return s.score;
    }
    return 0.0;
}

} // namespace

RegimeComparison compare_regimes(const BiasReport& full, const BiasReport& truncated) {
    if (full.sweep.step != truncated.sweep.step ||
        full.sweep.max_level != truncated.sweep.max_level ||
        full.sweep.budget != truncated.sweep.budget ||
        full.sweep.mc_samples != truncated.sweep.mc_samples ||
        full.sweep.mc_seed != truncated.sweep.mc_seed)
        throw data_error("compare_regimes: sweep configurations do not match");
    if (full.class_curve_polarity != truncated.class_curve_polarity ||
        full.node_polarities != truncated.node_polarities)
        throw data_error("compare_regimes: polarity configurations do not match");
    if (full.test_fingerprint != truncated.test_fingerprint)
        throw data_error("compare_regimes: reports were produced on different test sets");

    RegimeComparison cmp;
    auto compare_curve = [&](const SensitivityCurve& a, const SensitivityCurve& b) {
        RegimeComparison::CurveEntry entry;
        entry.target = a.target;
        entry.polarity = a.polarity;
        entry.score_delta = score_for(truncated, a.target, a.polarity) -
                            score_for(full, a.target, a.polarity);
        for (size_t p = 0; p < a.points.size() && p < b.points.size(); ++p) {
            const CurvePoint& pf = a.points[p];
            const CurvePoint& pt = b.points[p];
            RegimeComparison::LevelEntry le;
            le.level = pf.level;
            le.magnitude = pf.magnitude;
            le.delta.resize(pf.classes.size());
            for (size_t c = 0; c < pf.classes.size(); ++c) {
                if (pf.classes[c].present && pt.classes[c].present)
                    le.delta[c] = pt.classes[c].probability - pf.classes[c].probability;
            }
            le.low_class_full = lowest_probability_class(pf);
            le.low_class_truncated = lowest_probability_class(pt);
            le.flip = le.low_class_full && le.low_class_truncated &&
                      *le.low_class_full != *le.low_class_truncated;
            entry.levels.push_back(std::move(le));
        }
        cmp.curves.push_back(std::move(entry));
    };

    compare_curve(full.class_curve, truncated.class_curve);
    for (const SensitivityCurve& cf : full.node_curves) {
        const SensitivityCurve* ct = find_curve(truncated, cf.target, cf.polarity);
        if (!ct)
            throw data_error("compare_regimes: truncated report is missing a node curve");
        compare_curve(cf, *ct);
    }
    return cmp;
}

} // namespace nodebias
