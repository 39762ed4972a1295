#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nodebias {

struct DataRow {
    std::string id;
    std::vector<double> features;
    int label = 0;
};

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::vector<DataRow> rows;

    size_t feature_count() const { return feature_names.size(); }
    size_t class_count() const { return class_names.size(); }
    std::vector<size_t> class_counts() const;
};

struct ClassStats {
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    struct Entry {
        size_t count = 0;
        double mean = 0.0;
        double min = 0.0;
        double max = 0.0;
        // Unbiased (n-1) sample variance; absent when a class has < 2 rows.
        std::optional<double> variance;
    };
    // cells[class][feature]
    std::vector<std::vector<Entry>> cells;
};

struct SplitSpec {
    double train_fraction = 0.8;
    uint64_t seed = 0;
    bool stratified = true;
};

struct Normalizer {
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::vector<double> mean;
    std::vector<double> stddev; // 0 marks a constant feature (pass-through, centered)
    std::vector<double> raw_min;
    std::vector<double> raw_max;
};

struct SynthConfig {
    size_t n_features = 5;
    size_t head_count = 27;
    size_t tail_count = 11;
    double class_gap = 4.0;
    double spread = 1.0;
    uint64_t seed = 0;
};

// CSV: UTF-8, header row, optional `id` column, label text in the final
// column. Class ids follow first appearance; row ids are 1-based data-row
// numbers when no id column exists.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& ds, const std::string& path);

// Remaps labels onto a canonical class-name ordering, so datasets written
// and reloaded in different row orders stay label-compatible.
Dataset align_classes(const Dataset& ds, const std::vector<std::string>& canonical_names);

ClassStats class_stats(const Dataset& ds);

// Two-class Welch ranking: |mean_a - mean_b| / sqrt(s_a^2/n_a + s_b^2/n_b),
// descending, ties toward the lower index. Returns the first k indices.
std::vector<size_t> rank_features(const Dataset& ds, size_t k);

// Keeps the listed features, preserving their original column order.
Dataset select_features(const Dataset& ds, std::vector<size_t> indices);

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

Dataset truncate_to_balance(const Dataset& ds, uint64_t seed);

Normalizer normalize_fit(const Dataset& train);
Dataset normalize_apply(const Normalizer& nz, const Dataset& ds);
std::vector<double> denormalize(const Normalizer& nz, const std::vector<double>& x);

Dataset synth_longtail(const SynthConfig& config);

// FNV-1a over a canonical serialization; 16 hex digits.
std::string dataset_fingerprint(const Dataset& ds);

} // namespace nodebias
