#include "nodebias/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nodebias/errors.hpp"
#include "nodebias/model.hpp"
#include "nodebias/svg.hpp"
#include "nodebias/util.hpp"

namespace nodebias {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- plumbing

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw config_error(where + ": unknown key \"" + it.key() + "\"");
    }
}

json load_json_file(const fs::path& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + what + ": " + path.string());
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw data_error(what + " " + path.string() + " is not valid JSON: " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());
    out << text;
}

void write_json_file(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

// One run at a time per output directory.
class DirLock {
public:
    explicit DirLock(const fs::path& out) : path_(out / ".nodebias.lock") {
        std::error_code ec;
        fs::create_directories(out, ec);
        std::FILE* f = std::fopen(path_.string().c_str(), "wx");
        if (!f)
            throw config_error("output directory is locked by another run (remove " +
                               path_.string() + " if stale)");
        std::fclose(f);
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    fs::path path_;
};

class StageTimer {
public:
    StageTimer(const fs::path& out, std::string stage)
        : out_(out), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        try {
            json t = json::object();
            if (fs::exists(out_ / "timings.json")) t = load_json_file(out_ / "timings.json", "timings");
            t[stage_] = secs;
            write_json_file(out_ / "timings.json", t);
        } catch (...) {
            // timing is best effort
        }
    }

private:
    fs::path out_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

json read_manifest(const fs::path& out) {
    const fs::path p = out / "manifest.json";
    if (fs::exists(p)) return load_json_file(p, "manifest");
    json m;
    m["tool"] = "nodebias";
    m["tool_version"] = kToolVersion;
    m["stages_completed"] = json::array();
    m["files"] = json::array();
    m["timings"] = "timings.json";
    return m;
}

void manifest_add_files(json& manifest, const std::vector<std::string>& files) {
    std::set<std::string> all;
    for (const auto& f : manifest["files"]) all.insert(f.get<std::string>());
    all.insert(files.begin(), files.end());
    manifest["files"] = json::array();
    for (const auto& f : all) manifest["files"].push_back(f);
}

void manifest_mark_stage(json& manifest, const std::string& stage) {
    std::set<std::string> done;
    for (const auto& s : manifest["stages_completed"]) done.insert(s.get<std::string>());
    done.insert(stage);
    // keep pipeline order
    manifest["stages_completed"] = json::array();
    for (const char* s : {"prepare", "train", "analyze", "plot", "export-dtmc"}) {
        if (done.count(s)) manifest["stages_completed"].push_back(s);
    }
}

// ---------------------------------------------------------------- config

std::vector<std::string> polarity_names(const std::vector<Polarity>& ps) {
    std::vector<std::string> out;
    out.reserve(ps.size());
    for (Polarity p : ps) out.push_back(to_string(p));
    return out;
}

} // namespace

ExperimentConfig parse_config_json(const std::string& text, const std::string& where) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(where + " is not valid JSON: " + e.what());
    }

    ExperimentConfig cfg;
    try {
        reject_unknown_keys(j, {"dataset", "feature_select_k", "split", "regimes", "train",
                                "seeds", "truncate_seed", "sweep", "out_dir"},
                            where);
        if (!j.contains("dataset")) throw config_error(where + ": missing \"dataset\"");

        const json& dj = j["dataset"];
        reject_unknown_keys(dj, {"type", "path", "synthetic"}, where + ".dataset");
        const std::string type = dj.at("type").get<std::string>();
        if (type == "csv") {
            cfg.dataset.kind = DatasetSource::Kind::csv;
            if (!dj.contains("path"))
                throw config_error(where + ".dataset: csv source needs \"path\"");
            cfg.dataset.path = dj.at("path").get<std::string>();
        } else if (type == "synthetic") {
            cfg.dataset.kind = DatasetSource::Kind::synthetic;
        } else {
            throw config_error(where + ".dataset.type must be \"csv\" or \"synthetic\"");
        }
        if (dj.contains("synthetic")) {
            const json& sj = dj["synthetic"];
            reject_unknown_keys(sj,
                                {"n_features", "head_count", "tail_count", "test_head_count",
                                 "test_tail_count", "class_gap", "spread", "seed"},
                                where + ".dataset.synthetic");
            auto& sc = cfg.dataset.synth;
            sc.n_features = sj.value("n_features", sc.n_features);
            sc.head_count = sj.value("head_count", sc.head_count);
            sc.tail_count = sj.value("tail_count", sc.tail_count);
            sc.class_gap = sj.value("class_gap", sc.class_gap);
            sc.spread = sj.value("spread", sc.spread);
            sc.seed = sj.value("seed", sc.seed);
            cfg.dataset.test_head_count = sj.value("test_head_count", cfg.dataset.test_head_count);
            cfg.dataset.test_tail_count = sj.value("test_tail_count", cfg.dataset.test_tail_count);
        }

        cfg.feature_select_k = j.value("feature_select_k", cfg.feature_select_k);

        if (j.contains("split")) {
            const json& sj = j["split"];
            reject_unknown_keys(sj, {"train_fraction", "seed", "stratified"}, where + ".split");
            cfg.split.train_fraction = sj.value("train_fraction", cfg.split.train_fraction);
            cfg.split.seed = sj.value("seed", cfg.split.seed);
            cfg.split.stratified = sj.value("stratified", cfg.split.stratified);
        }

        if (j.contains("regimes")) {
            cfg.regimes = j["regimes"].get<std::vector<std::string>>();
        }
        if (cfg.regimes.empty()) throw config_error(where + ": regimes must not be empty");
        std::set<std::string> seen;
        for (const std::string& r : cfg.regimes) {
            if (r != "full" && r != "truncated")
                throw config_error(where + ": unknown regime \"" + r + "\"");
            if (!seen.insert(r).second)
                throw config_error(where + ": duplicate regime \"" + r + "\"");
        }

        if (j.contains("train")) {
            const json& tj = j["train"];
            reject_unknown_keys(tj,
                                {"hidden_width", "learning_rate", "epochs",
                                 "early_stop_at_train_accuracy", "l2"},
                                where + ".train");
            cfg.train.hidden_width = tj.value("hidden_width", cfg.train.hidden_width);
            cfg.train.learning_rate = tj.value("learning_rate", cfg.train.learning_rate);
            cfg.train.epochs = tj.value("epochs", cfg.train.epochs);
            cfg.train.early_stop_at_train_accuracy =
                tj.value("early_stop_at_train_accuracy", cfg.train.early_stop_at_train_accuracy);
            cfg.train.l2 = tj.value("l2", cfg.train.l2);
        }

        if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
        if (cfg.seeds.empty()) throw config_error(where + ": seeds must not be empty");
        if (std::set<uint64_t>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size())
            throw config_error(where + ": seeds must be distinct");

        cfg.truncate_seed = j.value("truncate_seed", cfg.truncate_seed);

        if (j.contains("sweep")) {
            const json& sj = j["sweep"];
            reject_unknown_keys(sj,
                                {"step", "max_level", "budget", "mc_samples", "mc_seed",
                                 "node_polarities", "class_polarity"},
                                where + ".sweep");
            cfg.sweep.step = sj.value("step", cfg.sweep.step);
            cfg.sweep.max_level = sj.value("max_level", cfg.sweep.max_level);
            cfg.sweep.budget = sj.value("budget", cfg.sweep.budget);
            cfg.sweep.mc_samples = sj.value("mc_samples", cfg.sweep.mc_samples);
            cfg.sweep.mc_seed = sj.value("mc_seed", cfg.sweep.mc_seed);
            if (sj.contains("class_polarity"))
                cfg.class_polarity = polarity_from_string(sj["class_polarity"].get<std::string>());
            if (sj.contains("node_polarities")) {
                cfg.node_polarities.clear();
                for (const auto& p : sj["node_polarities"])
                    cfg.node_polarities.push_back(polarity_from_string(p.get<std::string>()));
            }
        }

        cfg.out_dir = j.value("out_dir", cfg.out_dir);
    } catch (const json::exception& e) {
        throw config_error(where + ": " + e.what());
    }

    // validate before any work
    if (!(cfg.sweep.step > 0.0)) throw config_error(where + ": sweep.step must be positive");
    if (cfg.sweep.max_level < 1) throw config_error(where + ": sweep.max_level must be positive");
    if (cfg.sweep.budget < 1) throw config_error(where + ": sweep.budget must be positive");
    if (cfg.sweep.mc_samples < 1)
        throw config_error(where + ": sweep.mc_samples must be positive");
    if (cfg.train.hidden_width < 1)
        throw config_error(where + ": train.hidden_width must be positive");
    if (cfg.train.epochs < 1) throw config_error(where + ": train.epochs must be positive");
    if (!(cfg.train.learning_rate >= 0.0))
        throw config_error(where + ": train.learning_rate must be nonnegative");
    if (!(cfg.train.early_stop_at_train_accuracy > 0.0 &&
          cfg.train.early_stop_at_train_accuracy <= 1.0))
        throw config_error(where + ": train.early_stop_at_train_accuracy must lie in (0,1]");
    if (!(cfg.train.l2 >= 0.0)) throw config_error(where + ": train.l2 must be nonnegative");
    if (cfg.dataset.kind == DatasetSource::Kind::synthetic) {
        if (cfg.dataset.synth.head_count < 2 || cfg.dataset.synth.tail_count < 2)
            throw config_error(where + ": synthetic class counts must be at least 2");
        if (cfg.dataset.test_head_count < 1 || cfg.dataset.test_tail_count < 1)
            throw config_error(where + ": synthetic test counts must be at least 1");
    } else {
        if (!(cfg.split.train_fraction > 0.0 && cfg.split.train_fraction < 1.0))
            throw config_error(where + ": split.train_fraction must lie in (0,1)");
    }
    if (cfg.node_polarities.empty())
        throw config_error(where + ": sweep.node_polarities must not be empty");
    if (cfg.out_dir.empty()) throw config_error(where + ": out_dir must not be empty");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str(), path);
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["dataset"]["type"] =
        cfg.dataset.kind == DatasetSource::Kind::csv ? "csv" : "synthetic";
    if (cfg.dataset.kind == DatasetSource::Kind::csv) j["dataset"]["path"] = cfg.dataset.path;
    j["dataset"]["synthetic"] = {{"n_features", cfg.dataset.synth.n_features},
                                 {"head_count", cfg.dataset.synth.head_count},
                                 {"tail_count", cfg.dataset.synth.tail_count},
                                 {"test_head_count", cfg.dataset.test_head_count},
                                 {"test_tail_count", cfg.dataset.test_tail_count},
                                 {"class_gap", cfg.dataset.synth.class_gap},
                                 {"spread", cfg.dataset.synth.spread},
                                 {"seed", cfg.dataset.synth.seed}};
    j["feature_select_k"] = cfg.feature_select_k;
    j["split"] = {{"train_fraction", cfg.split.train_fraction},
                  {"seed", cfg.split.seed},
                  {"stratified", cfg.split.stratified}};
    j["regimes"] = cfg.regimes;
    j["train"] = {{"hidden_width", cfg.train.hidden_width},
                  {"learning_rate", cfg.train.learning_rate},
                  {"epochs", cfg.train.epochs},
                  {"early_stop_at_train_accuracy", cfg.train.early_stop_at_train_accuracy},
                  {"l2", cfg.train.l2}};
    j["seeds"] = cfg.seeds;
    j["truncate_seed"] = cfg.truncate_seed;
    j["sweep"] = {{"step", cfg.sweep.step},
                  {"max_level", cfg.sweep.max_level},
                  {"budget", cfg.sweep.budget},
                  {"mc_samples", cfg.sweep.mc_samples},
                  {"mc_seed", cfg.sweep.mc_seed},
                  {"class_polarity", to_string(cfg.class_polarity)},
                  {"node_polarities", polarity_names(cfg.node_polarities)}};
    j["out_dir"] = cfg.out_dir;
    return j.dump(2);
}

namespace {

bool regime_requested(const ExperimentConfig& cfg, const std::string& regime) {
    return std::find(cfg.regimes.begin(), cfg.regimes.end(), regime) != cfg.regimes.end();
}

// ---------------------------------------------------------------- normalizer io

json normalizer_to_json(const Normalizer& nz) {
    json j;
    j["feature_names"] = nz.feature_names;
    j["class_names"] = nz.class_names;
    j["mean"] = nz.mean;
    j["stddev"] = nz.stddev;
    j["raw_min"] = nz.raw_min;
    j["raw_max"] = nz.raw_max;
    return j;
}

Normalizer normalizer_from_json(const json& j, const std::string& where) {
    Normalizer nz;
    try {
        nz.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        nz.class_names = j.at("class_names").get<std::vector<std::string>>();
        nz.mean = j.at("mean").get<std::vector<double>>();
        nz.stddev = j.at("stddev").get<std::vector<double>>();
        nz.raw_min = j.at("raw_min").get<std::vector<double>>();
        nz.raw_max = j.at("raw_max").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw data_error(where + " violates the normalizer schema: " + e.what());
    }
    return nz;
}

Normalizer load_normalizer(const fs::path& out) {
    return normalizer_from_json(load_json_file(out / "normalizer.json", "normalizer"),
                                (out / "normalizer.json").string());
}

Dataset load_prepared_csv(const fs::path& path, const Normalizer& nz) {
    if (!fs::exists(path))
        throw data_error("missing prepared dataset " + path.string() + " (run prepare first)");
    return align_classes(load_csv(path.string()), nz.class_names);
}

// ---------------------------------------------------------------- csv emission

std::string csv_join(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += fields[i];
    }
    line += "\r\n";
    return line;
}

std::string target_label(const SweepTarget& t) {
    return t.is_all() ? "all_nodes" : "node";
}

void emit_variance_csv(std::ostringstream& out, const std::string& regime,
                       const VarianceTable& table) {
    for (size_t c = 0; c < table.class_names.size(); ++c) {
        for (size_t f = 0; f < table.feature_names.size(); ++f) {
            const auto& cell = table.cells[c][f];
            out << csv_join({regime, table.class_names[c], table.feature_names[f],
                             std::to_string(cell.count),
                             cell.variance ? fmt_double(*cell.variance) : "",
                             cell.is_class_min ? "true" : "false",
                             cell.is_class_max ? "true" : "false"});
        }
    }
}

size_t networks_present(const ClassPoint& cp) {
    size_t n = 0;
    for (const auto& r : cp.per_network) n += r.has_value() ? 1 : 0;
    return n;
}

void emit_curve_rows(std::ostringstream& out, const std::string& regime,
                     const std::vector<std::string>& feature_names,
                     const SensitivityCurve& curve) {
    for (const CurvePoint& point : curve.points) {
        for (size_t c = 0; c < point.classes.size(); ++c) {
            const ClassPoint& cp = point.classes[c];
            std::vector<std::string> fields;
            fields.push_back(regime);
            if (!curve.target.is_all()) {
                fields.push_back(std::to_string(curve.target.node));
                fields.push_back(feature_names[static_cast<size_t>(curve.target.node)]);
            }
            fields.push_back(to_string(curve.polarity));
            fields.push_back(std::to_string(point.level));
            fields.push_back(fmt_double(point.magnitude));
            fields.push_back(point.method == PreserveMethod::exact ? "exact" : "monte_carlo");
            fields.push_back(curve.class_names[c]);
            fields.push_back(cp.present ? "true" : "false");
            fields.push_back(cp.present ? fmt_double(cp.probability) : "");
            fields.push_back(cp.present ? cp.mean.num_string() : "");
            fields.push_back(cp.present ? cp.mean.den_string() : "");
            fields.push_back(std::to_string(cp.seed_count));
            fields.push_back(std::to_string(networks_present(cp)));
            out << csv_join(fields);
        }
    }
}

// ---------------------------------------------------------------- summary json

json ratio_json(const Ratio& r) {
    return json{{"num", r.num_string()}, {"den", r.den_string()}};
}

json curve_to_json(const SensitivityCurve& curve) {
    json j;
    if (curve.target.is_all()) j["target"] = "all";
    else j["target"] = curve.target.node;
    j["polarity"] = to_string(curve.polarity);
    j["step"] = curve.step;
    j["class_names"] = curve.class_names;
    j["points"] = json::array();
    for (const CurvePoint& point : curve.points) {
        json pj;
        pj["level"] = point.level;
        pj["magnitude"] = point.magnitude;
        pj["method"] = point.method == PreserveMethod::exact ? "exact" : "monte_carlo";
        pj["classes"] = json::array();
        for (size_t c = 0; c < point.classes.size(); ++c) {
            const ClassPoint& cp = point.classes[c];
            json cj;
            cj["class"] = curve.class_names[c];
            cj["present"] = cp.present;
            if (cp.present) {
                cj["probability"] = cp.probability;
                cj["num"] = cp.mean.num_string();
                cj["den"] = cp.mean.den_string();
                cj["seed_count"] = cp.seed_count;
                json per_net = json::array();
                for (const auto& r : cp.per_network)
                    per_net.push_back(r ? ratio_json(*r) : json(nullptr));
                cj["per_network"] = std::move(per_net);
            }
            pj["classes"].push_back(std::move(cj));
        }
        j["points"].push_back(std::move(pj));
    }
    return j;
}

json score_to_json(const BiasScore& s, const std::vector<std::string>& feature_names) {
    json j;
    j["target"] = target_label(s.target);
    if (!s.target.is_all()) {
        j["node"] = s.target.node;
        j["feature"] = feature_names[static_cast<size_t>(s.target.node)];
    }
    j["polarity"] = to_string(s.polarity);
    j["score"] = s.score;
    j["arg_level"] = s.arg_level;
    j["gap_area"] = s.gap_area;
    return j;
}

json validation_to_json(const ValidationSummary& v, uint64_t seed) {
    json j;
    j["seed"] = seed;
    j["total"] = v.total;
    j["correct"] = v.correct;
    j["accuracy"] = v.accuracy;
    j["per_class"] = json::array();
    for (const auto& pc : v.per_class) {
        json cj;
        cj["class"] = pc.class_name;
        cj["count"] = pc.count;
        cj["correct"] = pc.correct;
        if (pc.count > 0) cj["accuracy"] = pc.accuracy;
        j["per_class"].push_back(std::move(cj));
    }
    j["misclassified_ids"] = v.misclassified_ids;
    return j;
}

json variance_to_json(const VarianceTable& t) {
    json j;
    j["classes"] = t.class_names;
    j["features"] = t.feature_names;
    j["cells"] = json::array();
    for (size_t c = 0; c < t.class_names.size(); ++c) {
        json row = json::array();
        for (size_t f = 0; f < t.feature_names.size(); ++f) {
            const auto& cell = t.cells[c][f];
            json cj;
            cj["count"] = cell.count;
            cj["variance"] = cell.variance ? json(*cell.variance) : json(nullptr);
            cj["is_class_min"] = cell.is_class_min;
            cj["is_class_max"] = cell.is_class_max;
            row.push_back(std::move(cj));
        }
        j["cells"].push_back(std::move(row));
    }
    return j;
}

json comparison_to_json(const RegimeComparison& cmp) {
    json j;
    j["curves"] = json::array();
    for (const auto& curve : cmp.curves) {
        json cj;
        cj["target"] = curve.target.is_all() ? json("all") : json(curve.target.node);
        cj["polarity"] = to_string(curve.polarity);
        cj["score_delta"] = curve.score_delta;
        cj["levels"] = json::array();
        for (const auto& le : curve.levels) {
            json lj;
            lj["level"] = le.level;
            lj["magnitude"] = le.magnitude;
            lj["delta"] = json::array();
            for (const auto& d : le.delta) lj["delta"].push_back(d ? json(*d) : json(nullptr));
            lj["low_class_full"] = le.low_class_full ? json(*le.low_class_full) : json(nullptr);
            lj["low_class_truncated"] =
                le.low_class_truncated ? json(*le.low_class_truncated) : json(nullptr);
            lj["flip"] = le.flip;
            cj["levels"].push_back(std::move(lj));
        }
        j["curves"].push_back(std::move(cj));
    }
    return j;
}

} // namespace

// ------------------------------------------------------------------ prepare

PreparedBundle cmd_prepare(const ExperimentConfig& cfg, const fs::path& out) {
    DirLock lock(out);
    StageTimer timer(out, "prepare");

    json manifest = read_manifest(out);
    manifest["config"] = json::parse(config_to_json(cfg));
    write_json_file(out / "manifest.json", manifest);

    PreparedBundle bundle;
    Dataset source;
    if (cfg.dataset.kind == DatasetSource::Kind::csv) {
        source = load_csv(cfg.dataset.path);
    } else {
        SynthConfig sc = cfg.dataset.synth;
        sc.head_count += cfg.dataset.test_head_count;
        sc.tail_count += cfg.dataset.test_tail_count;
        source = synth_longtail(sc);
    }
    bundle.source_fingerprint = dataset_fingerprint(source);

    if (cfg.feature_select_k > 0) {
        source = select_features(source, rank_features(source, cfg.feature_select_k));
    }

    if (cfg.dataset.kind == DatasetSource::Kind::csv) {
        auto [train, test] = split(source, cfg.split);
        bundle.train = std::move(train);
        bundle.test = std::move(test);
    } else {
        // Heads come first in the generated order: the leading block of each
        // class is the training set, the rest is the holdout.
        Dataset train, test;
        train.feature_names = test.feature_names = source.feature_names;
        train.class_names = test.class_names = source.class_names;
        size_t head_seen = 0, tail_seen = 0;
        for (const DataRow& row : source.rows) {
            size_t& seen = (row.label == 0) ? head_seen : tail_seen;
            const size_t train_quota =
                (row.label == 0) ? cfg.dataset.synth.head_count : cfg.dataset.synth.tail_count;
            ((seen < train_quota) ? train : test).rows.push_back(row);
            ++seen;
        }
        bundle.train = std::move(train);
        bundle.test = std::move(test);
    }

    bundle.train_fingerprint = dataset_fingerprint(bundle.train);
    bundle.test_fingerprint = dataset_fingerprint(bundle.test);

    std::vector<std::string> files = {"train.csv", "test.csv", "normalizer.json",
                                      "variance_table.csv", "manifest.json"};
    save_csv(bundle.train, (out / "train.csv").string());
    save_csv(bundle.test, (out / "test.csv").string());

    std::ostringstream var_csv;
    var_csv << csv_join({"regime", "class", "feature", "count", "variance", "is_class_min",
                         "is_class_max"});
    emit_variance_csv(var_csv, "full", variance_table(bundle.train));

    if (regime_requested(cfg, "truncated")) {
        bundle.train_truncated = truncate_to_balance(bundle.train, cfg.truncate_seed);
        bundle.truncated_fingerprint = dataset_fingerprint(bundle.train_truncated);
        save_csv(bundle.train_truncated, (out / "train_truncated.csv").string());
        emit_variance_csv(var_csv, "truncated", variance_table(bundle.train_truncated));
        files.push_back("train_truncated.csv");
    }
    write_text(out / "variance_table.csv", var_csv.str());

    bundle.normalizer = normalize_fit(bundle.train);
    write_json_file(out / "normalizer.json", normalizer_to_json(bundle.normalizer));

    json fingerprints;
    fingerprints["source"] = bundle.source_fingerprint;
    fingerprints["train"] = bundle.train_fingerprint;
    fingerprints["test"] = bundle.test_fingerprint;
    if (!bundle.truncated_fingerprint.empty())
        fingerprints["train_truncated"] = bundle.truncated_fingerprint;
    manifest["fingerprints"] = fingerprints;
    manifest_add_files(manifest, files);
    manifest_mark_stage(manifest, "prepare");
    write_json_file(out / "manifest.json", manifest);
    return bundle;
}

// ------------------------------------------------------------------ train

TrainOutcome cmd_train(const ExperimentConfig& cfg, const fs::path& out) {
    DirLock lock(out);
    StageTimer timer(out, "train");

    const Normalizer nz = load_normalizer(out);
    const Dataset test = normalize_apply(nz, load_prepared_csv(out / "test.csv", nz));

    json manifest = read_manifest(out);
    json validation_json;
    TrainOutcome outcome;
    std::vector<std::string> files = {"validation.json", "manifest.json"};

    for (const std::string& regime : cfg.regimes) {
        const fs::path train_path =
            out / (regime == "truncated" ? "train_truncated.csv" : "train.csv");
        const Dataset train_raw = load_prepared_csv(train_path, nz);
        const Dataset train = normalize_apply(nz, train_raw);

        fs::create_directories(out / "models" / regime);
        RunSet runs;
        runs.config = cfg.train;
        runs.dataset_fingerprint = dataset_fingerprint(train_raw);

        json regime_validation = json::array();
        for (uint64_t seed : cfg.seeds) {
            TrainConfig one = cfg.train;
            one.seed = seed;
            const std::string model_rel =
                "models/" + regime + "/seed_" + std::to_string(seed) + ".json";
            try {
                RunEntry entry;
                entry.seed = seed;
                entry.network = train_one(train, one);
                entry.network.meta["regime"] = regime;
                entry.validation = validate_model(entry.network, test);
                save_model(entry.network, (out / model_rel).string());
                files.push_back(model_rel);
                regime_validation.push_back(validation_to_json(entry.validation, seed));
                runs.entries.push_back(std::move(entry));
            } catch (const numeric_error& e) {
                outcome.failures.push_back({regime, seed, e.what()});
            }
        }
        validation_json[regime] = std::move(regime_validation);
        outcome.runs.emplace(regime, std::move(runs));
    }

    if (!outcome.failures.empty()) {
        json fj = json::array();
        for (const auto& f : outcome.failures)
            fj.push_back({{"regime", f.regime}, {"seed", f.seed}, {"error", f.message}});
        validation_json["failures"] = std::move(fj);
    }
    write_json_file(out / "validation.json", validation_json);

    manifest["validation"] = validation_json;
    manifest_add_files(manifest, files);
    manifest_mark_stage(manifest, "train");
    write_json_file(out / "manifest.json", manifest);
    return outcome;
}

// ------------------------------------------------------------------ analyze

namespace {

RunSet load_runset(const ExperimentConfig& cfg, const fs::path& out, const std::string& regime,
                   const Dataset& test_normalized, const std::string& train_fingerprint) {
    std::vector<std::string> missing;
    RunSet runs;
    runs.config = cfg.train;
    runs.dataset_fingerprint = train_fingerprint;
    for (uint64_t seed : cfg.seeds) {
        const fs::path path = out / "models" / regime / ("seed_" + std::to_string(seed) + ".json");
        if (!fs::exists(path)) {
            missing.push_back(path.string());
            continue;
        }
        RunEntry entry;
        entry.seed = seed;
        entry.network = load_model(path.string());
        entry.validation = validate_model(entry.network, test_normalized);
        runs.entries.push_back(std::move(entry));
    }
    if (!missing.empty()) {
        std::string msg = "missing model files (run train first):";
        for (const std::string& m : missing) msg += "\n  " + m;
        throw data_error(msg);
    }
    return runs;
}

BiasReport build_report(const ExperimentConfig& cfg, const std::string& regime,
                        const RunSet& runs, const Dataset& test_normalized,
                        const Dataset& train_raw, const std::string& test_fingerprint) {
    BiasReport report;
    report.regime = regime;
    report.train_fingerprint = runs.dataset_fingerprint;
    report.test_fingerprint = test_fingerprint;
    report.sweep = cfg.sweep;
    report.class_curve_polarity = cfg.class_polarity;
    report.node_polarities = cfg.node_polarities;
    for (const RunEntry& e : runs.entries) {
        report.training_seeds.push_back(e.seed);
        report.validations.push_back(e.validation);
    }
    report.class_curve =
        class_robustness_curve(runs, test_normalized, cfg.class_polarity, cfg.sweep);
    for (Polarity polarity : cfg.node_polarities) {
        for (SensitivityCurve& c :
             node_sensitivity_curves(runs, test_normalized, polarity, cfg.sweep)) {
            report.node_curves.push_back(std::move(c));
        }
    }
    report.scores.push_back(bias_score(report.class_curve));
    for (const SensitivityCurve& c : report.node_curves)
        report.scores.push_back(bias_score(c));
    report.variance = variance_table(train_raw);
    return report;
}

} // namespace

AnalyzeOutcome cmd_analyze(const ExperimentConfig& cfg, const fs::path& out) {
    DirLock lock(out);
    StageTimer timer(out, "analyze");

    const Normalizer nz = load_normalizer(out);
    const Dataset test_raw = load_prepared_csv(out / "test.csv", nz);
    const Dataset test = normalize_apply(nz, test_raw);
    const std::string test_fingerprint = dataset_fingerprint(test_raw);

    AnalyzeOutcome outcome;
    std::ostringstream class_csv, node_csv, score_csv;
    class_csv << csv_join({"regime", "polarity", "level", "magnitude", "method", "class",
                           "present", "probability", "mean_num", "mean_den", "seed_count",
                           "network_count"});
    node_csv << csv_join({"regime", "node", "feature", "polarity", "level", "magnitude",
                          "method", "class", "present", "probability", "mean_num", "mean_den",
                          "seed_count", "network_count"});
    score_csv << csv_join(
        {"regime", "target", "node", "feature", "polarity", "score", "arg_level", "gap_area"});

    json summary;
    summary["tool_version"] = kToolVersion;
    summary["config"] = json::parse(config_to_json(cfg));
    summary["class_names"] = nz.class_names;
    summary["feature_names"] = nz.feature_names;
    {
        json raw_steps = json::array();
        for (double sd : nz.stddev)
            raw_steps.push_back(cfg.sweep.step * (sd > 0.0 ? sd : 1.0));
        summary["raw_step_equivalents"] = std::move(raw_steps);
    }
    json manifest = read_manifest(out);
    if (manifest.contains("fingerprints")) summary["fingerprints"] = manifest["fingerprints"];
    summary["regimes"] = json::object();

    for (const std::string& regime : cfg.regimes) {
        const fs::path train_path =
            out / (regime == "truncated" ? "train_truncated.csv" : "train.csv");
        const Dataset train_raw = load_prepared_csv(train_path, nz);
        RunSet runs = load_runset(cfg, out, regime, test, dataset_fingerprint(train_raw));
        BiasReport report = build_report(cfg, regime, runs, test, train_raw, test_fingerprint);

        emit_curve_rows(class_csv, regime, nz.feature_names, report.class_curve);
        for (const SensitivityCurve& c : report.node_curves)
            emit_curve_rows(node_csv, regime, nz.feature_names, c);
        for (const BiasScore& s : report.scores) {
            score_csv << csv_join(
                {regime, target_label(s.target),
                 s.target.is_all() ? "" : std::to_string(s.target.node),
                 s.target.is_all() ? ""
                                   : nz.feature_names[static_cast<size_t>(s.target.node)],
                 to_string(s.polarity), fmt_double(s.score), std::to_string(s.arg_level),
                 fmt_double(s.gap_area)});
        }

        json rj;
        rj["training_seeds"] = report.training_seeds;
        rj["train_fingerprint"] = report.train_fingerprint;
        rj["test_fingerprint"] = report.test_fingerprint;
        rj["validation"] = json::array();
        for (size_t i = 0; i < report.validations.size(); ++i) {
            rj["validation"].push_back(
                validation_to_json(report.validations[i], report.training_seeds[i]));
        }
        rj["class_curve"] = curve_to_json(report.class_curve);
        rj["node_curves"] = json::array();
        for (const SensitivityCurve& c : report.node_curves)
            rj["node_curves"].push_back(curve_to_json(c));
        rj["bias_scores"] = json::array();
        for (const BiasScore& s : report.scores)
            rj["bias_scores"].push_back(score_to_json(s, nz.feature_names));
        rj["variance_table"] = variance_to_json(report.variance);
        summary["regimes"][regime] = std::move(rj);

        outcome.reports.emplace(regime, std::move(report));
    }

    std::ostringstream cmp_csv;
    cmp_csv << csv_join({"target", "node", "feature", "polarity", "level", "magnitude", "class",
                         "full_probability", "truncated_probability", "delta", "low_class_full",
                         "low_class_truncated", "flip"});
    if (outcome.reports.count("full") && outcome.reports.count("truncated")) {
        outcome.comparison =
            compare_regimes(outcome.reports.at("full"), outcome.reports.at("truncated"));
        const BiasReport& full = outcome.reports.at("full");
        for (const auto& curve : outcome.comparison->curves) {
            const SensitivityCurve* cf = nullptr;
            if (curve.target.is_all()) {
                cf = &full.class_curve;
            } else {
                for (const SensitivityCurve& c : full.node_curves) {
                    if (c.target == curve.target && c.polarity == curve.polarity) cf = &c;
                }
            }
            const SensitivityCurve* ct = nullptr;
            const BiasReport& trunc = outcome.reports.at("truncated");
            if (curve.target.is_all()) {
                ct = &trunc.class_curve;
            } else {
                for (const SensitivityCurve& c : trunc.node_curves) {
                    if (c.target == curve.target && c.polarity == curve.polarity) ct = &c;
                }
            }
            for (size_t li = 0; li < curve.levels.size(); ++li) {
                const auto& le = curve.levels[li];
                for (size_t c = 0; c < le.delta.size(); ++c) {
                    const ClassPoint& pf = cf->points[li].classes[c];
                    const ClassPoint& pt = ct->points[li].classes[c];
                    cmp_csv << csv_join(
                        {curve.target.is_all() ? "all_nodes" : "node",
                         curve.target.is_all() ? "" : std::to_string(curve.target.node),
                         curve.target.is_all()
                             ? ""
                             : nz.feature_names[static_cast<size_t>(curve.target.node)],
                         to_string(curve.polarity), std::to_string(le.level),
                         fmt_double(le.magnitude), nz.class_names[c],
                         pf.present ? fmt_double(pf.probability) : "",
                         pt.present ? fmt_double(pt.probability) : "",
                         le.delta[c] ? fmt_double(*le.delta[c]) : "",
                         le.low_class_full ? nz.class_names[static_cast<size_t>(
                                                 *le.low_class_full)]
                                           : "",
                         le.low_class_truncated ? nz.class_names[static_cast<size_t>(
                                                      *le.low_class_truncated)]
                                                : "",
                         le.flip ? "true" : "false"});
                }
            }
        }
        summary["comparison"] = comparison_to_json(*outcome.comparison);
    }

    write_text(out / "robustness_bias.csv", class_csv.str());
    write_text(out / "node_sensitivity.csv", node_csv.str());
    write_text(out / "bias_scores.csv", score_csv.str());
    write_text(out / "comparison.csv", cmp_csv.str());
    write_json_file(out / "summary.json", summary);

    manifest_add_files(manifest, {"robustness_bias.csv", "node_sensitivity.csv",
                                  "bias_scores.csv", "comparison.csv", "summary.json",
                                  "manifest.json"});
    manifest_mark_stage(manifest, "analyze");
    write_json_file(out / "manifest.json", manifest);
    return outcome;
}

// ------------------------------------------------------------------ plot

namespace {

const char* regime_color(const std::string& regime) {
    return regime == "truncated" ? "#ff7f0e" : "#1f77b4";
}

void curve_series(const json& curve, const std::string& regime,
                  std::vector<PlotSeries>& series) {
    const auto class_names = curve.at("class_names").get<std::vector<std::string>>();
    for (size_t c = 0; c < class_names.size(); ++c) {
        PlotSeries s;
        s.label = regime + " / " + class_names[c];
        s.color = regime_color(regime);
        s.dashed = (c % 2 == 1);
        for (const json& point : curve.at("points")) {
            const json& cj = point.at("classes").at(c);
            if (!cj.at("present").get<bool>()) continue;
            const double x = point.at("magnitude").get<double>();
            s.line.emplace_back(x, cj.at("probability").get<double>());
            for (const json& pn : cj.at("per_network")) {
                if (pn.is_null()) continue;
                const double num = std::stod(pn.at("num").get<std::string>());
                const double den = std::stod(pn.at("den").get<std::string>());
                s.points.emplace_back(x, num / den);
            }
        }
        series.push_back(std::move(s));
    }
}

} // namespace

void cmd_plot(const ExperimentConfig& cfg, const fs::path& out) {
    (void)cfg;
    DirLock lock(out);
    StageTimer timer(out, "plot");

    if (!fs::exists(out / "summary.json"))
        throw data_error("no analysis results in " + out.string() + " (run analyze first)");
    const json summary = load_json_file(out / "summary.json", "summary");
    fs::create_directories(out / "plots");

    std::vector<std::string> regimes;
    for (auto it = summary.at("regimes").begin(); it != summary.at("regimes").end(); ++it)
        regimes.push_back(it.key());
    std::sort(regimes.begin(), regimes.end()); // full before truncated
    if (regimes.empty()) throw data_error("summary contains no regimes");

    std::vector<std::string> files = {"manifest.json"};

    // Class robustness, all regimes on one chart.
    {
        PlotSpec spec;
        spec.title = "class robustness (all-node noise)";
        double x_max = 0.0;
        for (const std::string& regime : regimes) {
            const json& curve = summary["regimes"][regime]["class_curve"];
            curve_series(curve, regime, spec.series);
            for (const json& point : curve.at("points"))
                x_max = std::max(x_max, point.at("magnitude").get<double>());
        }
        spec.x_max = x_max > 0 ? x_max : 1.0;
        write_text(out / "plots" / "class_robustness.svg", render_line_chart(spec));
        files.push_back("plots/class_robustness.svg");
    }

    // Node sensitivity grids, one file per polarity.
    const auto feature_names = summary.at("feature_names").get<std::vector<std::string>>();
    std::vector<std::string> polarities;
    for (const std::string& regime : regimes) {
        for (const json& curve : summary["regimes"][regime]["node_curves"]) {
            const std::string p = curve.at("polarity").get<std::string>();
            if (std::find(polarities.begin(), polarities.end(), p) == polarities.end())
                polarities.push_back(p);
        }
    }
    for (const std::string& polarity : polarities) {
        std::vector<PlotSpec> charts(feature_names.size());
        double x_max = 0.0;
        for (size_t node = 0; node < feature_names.size(); ++node) {
            charts[node].title = "node " + std::to_string(node) + " (" + feature_names[node] + ")";
            for (const std::string& regime : regimes) {
                for (const json& curve : summary["regimes"][regime]["node_curves"]) {
                    if (curve.at("polarity").get<std::string>() != polarity) continue;
                    if (!curve.at("target").is_number() ||
                        curve.at("target").get<size_t>() != node)
                        continue;
                    curve_series(curve, regime, charts[node].series);
                    for (const json& point : curve.at("points"))
                        x_max = std::max(x_max, point.at("magnitude").get<double>());
                }
            }
        }
        for (PlotSpec& c : charts) c.x_max = x_max > 0 ? x_max : 1.0;
        const std::string rel = "plots/node_sensitivity_" + polarity + ".svg";
        write_text(out / rel,
                   render_chart_grid("node sensitivity, " + polarity + " noise", charts,
                                     std::min<size_t>(3, charts.size())));
        files.push_back(rel);
    }

    json manifest = read_manifest(out);
    manifest_add_files(manifest, files);
    manifest_mark_stage(manifest, "plot");
    write_json_file(out / "manifest.json", manifest);
}

// ------------------------------------------------------------------ export-dtmc

namespace {

std::string sanitize_for_filename(const std::string& s) {
    std::string out;
    for (char ch : s) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '-' || ch == '_';
        out.push_back(ok ? ch : '_');
    }
    return out;
}

} // namespace

PreservationCount cmd_export_dtmc(const ExperimentConfig& cfg, const fs::path& out,
                                  const DtmcRequest& req) {
    DirLock lock(out);
    StageTimer timer(out, "export-dtmc");

    if (!regime_requested(cfg, req.regime))
        throw config_error("regime \"" + req.regime + "\" is not part of this experiment");
    const fs::path model_path =
        out / "models" / req.regime / ("seed_" + std::to_string(req.train_seed) + ".json");
    if (!fs::exists(model_path))
        throw data_error("missing model file: " + model_path.string());

    const Normalizer nz = load_normalizer(out);
    const Dataset test = normalize_apply(nz, load_prepared_csv(out / "test.csv", nz));
    const Network net = load_model(model_path.string());

    const SeedInput* seed = nullptr;
    std::vector<SeedInput> seeds = make_seed_inputs(net, test);
    for (const SeedInput& s : seeds) {
        if (s.id == req.input_id) seed = &s;
    }
    if (!seed) throw data_error("test input \"" + req.input_id + "\" not found");

    NoiseSweep sweep;
    sweep.step = cfg.sweep.step;
    sweep.max_level = cfg.sweep.max_level;
    sweep.polarity = req.polarity;
    if (req.node) {
        if (*req.node < 0 || *req.node >= net.input_dim)
            throw config_error("node index " + std::to_string(*req.node) + " out of range [0, " +
                               std::to_string(net.input_dim) + ")");
        sweep.target = SweepTarget::single_node(*req.node);
    } else {
        sweep.target = SweepTarget::all_nodes();
    }

    fs::create_directories(out / "dtmc");
    const std::string name = req.regime + "_seed" + std::to_string(req.train_seed) + "_in" +
                             sanitize_for_filename(req.input_id) + "_" +
                             (req.node ? "node" + std::to_string(*req.node) : "all") + "_" +
                             to_string(req.polarity) + "_L" + std::to_string(req.level) + ".pm";
    const fs::path model_file = out / "dtmc" / name;

    const PreservationCount count =
        export_dtmc(net, *seed, sweep, req.level, model_file.string(), cfg.sweep.budget);

    json manifest = read_manifest(out);
    manifest_add_files(manifest,
                       {"dtmc/" + name, "dtmc/" + name.substr(0, name.size() - 3) + ".props",
                        "manifest.json"});
    manifest_mark_stage(manifest, "export-dtmc");
    write_json_file(out / "manifest.json", manifest);
    return count;
}

// ------------------------------------------------------------------ CLI

namespace {

std::vector<uint64_t> parse_seed_spec(const std::string& spec) {
    std::vector<uint64_t> seeds;
    const size_t range = spec.find("..");
    try {
        if (range != std::string::npos) {
            const uint64_t lo = std::stoull(spec.substr(0, range));
            const uint64_t hi = std::stoull(spec.substr(range + 2));
            if (hi < lo) throw config_error("--seeds range is reversed: " + spec);
            for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } else {
            std::istringstream in(spec);
            std::string part;
            while (std::getline(in, part, ',')) {
                if (!part.empty()) seeds.push_back(std::stoull(part));
            }
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error("cannot parse --seeds \"" + spec + "\" (use N, N,M,... or N..M)");
    }
    if (seeds.empty()) throw config_error("--seeds \"" + spec + "\" selects no seeds");
    return seeds;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"robustness-bias analysis of small ReLU classifiers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string seed_spec;
    std::string regime_filter = "both";
    DtmcRequest dtmc;
    std::string dtmc_node = "all";
    std::string dtmc_polarity = "symmetric";

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
        if (needs_config) opt->required();
        sub->add_option("--out", out_override, "output directory (overrides config out_dir)");
    };

    CLI::App* prepare = app.add_subcommand("prepare", "ingest data, select features, split");
    add_common(prepare);
    CLI::App* train = app.add_subcommand("train", "train networks for each regime and seed");
    add_common(train);
    train->add_option("--seeds", seed_spec, "seed selection, e.g. 0..9 or 0,2,5");
    train->add_option("--regime", regime_filter, "full, truncated or both");
    CLI::App* analyze = app.add_subcommand("analyze", "compute curves, scores and comparisons");
    add_common(analyze);
    analyze->add_option("--seeds", seed_spec, "seed selection, e.g. 0..9 or 0,2,5");
    analyze->add_option("--regime", regime_filter, "full, truncated or both");
    CLI::App* plot = app.add_subcommand("plot", "render SVG charts from analyze output");
    add_common(plot);
    CLI::App* exp = app.add_subcommand("export-dtmc", "export one preservation experiment "
                                                      "as a PRISM DTMC");
    add_common(exp);
    exp->add_option("--regime", dtmc.regime, "model regime")->required();
    exp->add_option("--train-seed", dtmc.train_seed, "training seed of the model")->required();
    exp->add_option("--input-id", dtmc.input_id, "test input id")->required();
    exp->add_option("--node", dtmc_node, "node index, or \"all\"");
    exp->add_option("--level", dtmc.level, "noise level")->required();
    exp->add_option("--polarity", dtmc_polarity, "positive, negative or symmetric");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 prints usage; fold its exit codes into the documented scheme
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (!seed_spec.empty()) cfg.seeds = parse_seed_spec(seed_spec);
        if (regime_filter != "both") {
            if (regime_filter != "full" && regime_filter != "truncated")
                throw config_error("--regime must be full, truncated or both");
            if (!regime_requested(cfg, regime_filter))
                throw config_error("--regime " + regime_filter +
                                   " is not part of this experiment config");
            cfg.regimes = {regime_filter};
        }
        const fs::path out = out_override.empty() ? fs::path(cfg.out_dir) : fs::path(out_override);

        if (prepare->parsed()) {
            cmd_prepare(cfg, out);
            std::cout << "prepared dataset bundle in " << out.string() << "\n";
        } else if (train->parsed()) {
            const TrainOutcome outcome = cmd_train(cfg, out);
            size_t trained = 0;
            for (const auto& [regime, runs] : outcome.runs) trained += runs.entries.size();
            std::cout << "trained " << trained << " network(s) in " << out.string() << "\n";
            if (!outcome.failures.empty()) {
                for (const auto& f : outcome.failures) {
                    std::cerr << "training failed: regime " << f.regime << ", seed " << f.seed
                              << ": " << f.message << "\n";
                }
                return 3;
            }
        } else if (analyze->parsed()) {
            cmd_analyze(cfg, out);
            std::cout << "analysis written to " << out.string() << "\n";
        } else if (plot->parsed()) {
            cmd_plot(cfg, out);
            std::cout << "plots written to " << (out / "plots").string() << "\n";
        } else if (exp->parsed()) {
            if (dtmc_node != "all") {
                try {
                    dtmc.node = std::stoi(dtmc_node);
                } catch (const std::exception&) {
                    throw config_error("--node must be an index or \"all\"");
                }
            }
            dtmc.polarity = polarity_from_string(dtmc_polarity);
            const PreservationCount count = cmd_export_dtmc(cfg, out, dtmc);
            std::cout << "exported dtmc: preserved " << count.preserved << " of " << count.total
                      << " (P = " << fmt_double(count.probability()) << ")\n";
        }
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace nodebias
