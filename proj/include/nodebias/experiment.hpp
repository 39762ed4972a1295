#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nodebias/analysis.hpp"
#include "nodebias/data.hpp"
#include "nodebias/perturb.hpp"
#include "nodebias/train.hpp"

namespace nodebias {

inline constexpr const char* kToolVersion = "0.1.0";

struct DatasetSource {
    enum class Kind { csv, synthetic };
    Kind kind = Kind::synthetic;
    std::string path; // csv only
    SynthConfig synth;
    size_t test_head_count = 9; // synthetic holdout, drawn from the same clouds
    size_t test_tail_count = 5;
};

// Full experiment description. Every field except the dataset source has a
// default; the parsed config is echoed into every output for provenance.
struct ExperimentConfig {
    DatasetSource dataset;
    size_t feature_select_k = 0; // 0 keeps all features
    SplitSpec split;             // csv sources only
    std::vector<std::string> regimes = {"full", "truncated"};
    TrainConfig train;
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    uint64_t truncate_seed = 1234;
    SweepSettings sweep;
    Polarity class_polarity = Polarity::symmetric;
    std::vector<Polarity> node_polarities = {Polarity::negative, Polarity::positive};
    std::string out_dir = "out";
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text, const std::string& where);
std::string config_to_json(const ExperimentConfig& cfg);

struct PreparedBundle {
    Dataset train;
    Dataset test;
    Dataset train_truncated; // empty when the truncated regime is not requested
    Normalizer normalizer;
    std::string source_fingerprint;
    std::string train_fingerprint;
    std::string test_fingerprint;
    std::string truncated_fingerprint;
};

struct TrainFailure {
    std::string regime;
    uint64_t seed = 0;
    std::string message;
};

struct TrainOutcome {
    std::map<std::string, RunSet> runs; // by regime
    std::vector<TrainFailure> failures;
};

struct AnalyzeOutcome {
    std::map<std::string, BiasReport> reports; // by regime
    std::optional<RegimeComparison> comparison;
};

struct DtmcRequest {
    std::string regime = "full";
    uint64_t train_seed = 0;
    std::string input_id;
    std::optional<int> node; // absent = all nodes
    int level = 1;
    Polarity polarity = Polarity::symmetric;
};

PreparedBundle cmd_prepare(const ExperimentConfig& cfg, const std::filesystem::path& out);
TrainOutcome cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& out);
AnalyzeOutcome cmd_analyze(const ExperimentConfig& cfg, const std::filesystem::path& out);
void cmd_plot(const ExperimentConfig& cfg, const std::filesystem::path& out);
// Returns the exact counts behind the exported file.
PreservationCount cmd_export_dtmc(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                  const DtmcRequest& req);

// Full argv-style entry point; maps errors onto exit codes
// (1 usage/config, 2 data, 3 numeric).
int run_cli(const std::vector<std::string>& args);

} // namespace nodebias
