#include "nodebias/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "nodebias/errors.hpp"
#include "nodebias/rng.hpp"
#include "nodebias/util.hpp"

namespace nodebias {

std::vector<size_t> Dataset::class_counts() const {
    std::vector<size_t> counts(class_names.size(), 0);
    for (const DataRow& row : rows) counts[static_cast<size_t>(row.label)] += 1;
    return counts;
}

namespace {

// RFC-4180 field splitting for one record. Assumes records do not span
// physical lines (none of our emitted data embeds newlines).
std::vector<std::string> split_csv_record(const std::string& line, size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch == '\r') {
            // tolerated at end of line
        } else {
            cur.push_back(ch);
        }
    }
    if (quoted) throw data_error("line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(cur);
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

} // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw data_error(path + ": empty file (header row required)");
    const std::vector<std::string> header = split_csv_record(line, 1);
    if (header.size() < 2)
        throw data_error(path + ": header needs at least one feature column and a label column");

    size_t id_col = header.size(); // sentinel: no id column
    for (size_t i = 0; i + 1 < header.size(); ++i) {
        if (header[i] == "id") {
            id_col = i;
            break;
        }
    }
    const size_t label_col = header.size() - 1;

    Dataset ds;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i != id_col && i != label_col) ds.feature_names.push_back(header[i]);
    }
    if (ds.feature_names.empty()) throw data_error(path + ": no feature columns");

    std::map<std::string, int> class_ids;
    std::set<std::string> seen_ids;
    size_t line_no = 1;
    size_t data_row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        ++data_row;
        const std::vector<std::string> fields = split_csv_record(line, line_no);
        if (fields.size() != header.size())
            throw data_error(path + ": line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(header.size()));
        DataRow row;
        row.id = (id_col < header.size()) ? fields[id_col] : std::to_string(data_row);
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i == id_col || i == label_col) continue;
            const auto v = parse_double(fields[i]);
            if (!v || !std::isfinite(*v))
                throw data_error(path + ": line " + std::to_string(line_no) + ", column \"" +
                                 header[i] + "\": non-numeric feature value \"" + fields[i] + "\"");
            row.features.push_back(*v);
        }
        const std::string& label = fields[label_col];
        auto it = class_ids.find(label);
        if (it == class_ids.end()) {
            it = class_ids.emplace(label, static_cast<int>(ds.class_names.size())).first;
            ds.class_names.push_back(label);
        }
        row.label = it->second;
        if (!seen_ids.insert(row.id).second)
            throw data_error(path + ": duplicate row id \"" + row.id + "\"");
        ds.rows.push_back(std::move(row));
    }

    if (ds.rows.empty()) throw data_error(path + ": no data rows");
    if (ds.class_names.size() < 2) throw data_error(path + ": dataset has a single class");
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write dataset: " + path);
    out << "id";
    for (const std::string& name : ds.feature_names) out << ',' << csv_escape(name);
    out << ",label\r\n";
    for (const DataRow& row : ds.rows) {
        out << csv_escape(row.id);
        for (double v : row.features) out << ',' << fmt_double(v);
        out << ',' << csv_escape(ds.class_names[static_cast<size_t>(row.label)]) << "\r\n";
    }
}

Dataset align_classes(const Dataset& ds, const std::vector<std::string>& canonical_names) {
    std::map<std::string, int> target;
    for (size_t i = 0; i < canonical_names.size(); ++i)
        target[canonical_names[i]] = static_cast<int>(i);
    Dataset out = ds;
    out.class_names = canonical_names;
    for (DataRow& row : out.rows) {
        const std::string& name = ds.class_names[static_cast<size_t>(row.label)];
        auto it = target.find(name);
        if (it == target.end())
            throw data_error("class \"" + name + "\" is not in the canonical class list");
        row.label = it->second;
    }
    return out;
}

ClassStats class_stats(const Dataset& ds) {
    if (ds.rows.empty()) throw data_error("class_stats: empty dataset");
    const size_t n_classes = ds.class_names.size();
    const size_t n_features = ds.feature_names.size();

    ClassStats stats;
    stats.class_names = ds.class_names;
    stats.feature_names = ds.feature_names;
    stats.cells.assign(n_classes, std::vector<ClassStats::Entry>(n_features));

    for (size_t c = 0; c < n_classes; ++c) {
        for (size_t f = 0; f < n_features; ++f) {
            ClassStats::Entry& e = stats.cells[c][f];
            double sum = 0.0;
            e.min = std::numeric_limits<double>::infinity();
            e.max = -std::numeric_limits<double>::infinity();
            for (const DataRow& row : ds.rows) {
                if (static_cast<size_t>(row.label) != c) continue;
                const double v = row.features[f];
                e.count += 1;
                sum += v;
                e.min = std::min(e.min, v);
                e.max = std::max(e.max, v);
            }
            if (e.count == 0) {
                e.min = e.max = 0.0;
                continue;
            }
            e.mean = sum / static_cast<double>(e.count);
            if (e.count >= 2) {
                double ss = 0.0;
                for (const DataRow& row : ds.rows) {
                    if (static_cast<size_t>(row.label) != c) continue;
                    const double d = row.features[f] - e.mean;
                    ss += d * d;
                }
                e.variance = ss / static_cast<double>(e.count - 1);
            }
        }
    }
    return stats;
}

std::vector<size_t> rank_features(const Dataset& ds, size_t k) {
    if (ds.class_names.size() != 2)
        throw data_error("rank_features: ranking criterion is two-sample, dataset has " +
                         std::to_string(ds.class_names.size()) + " classes");
    if (k > ds.feature_count())
        throw data_error("rank_features: k=" + std::to_string(k) + " exceeds feature count " +
                         std::to_string(ds.feature_count()));

    const ClassStats stats = class_stats(ds);
    for (size_t c = 0; c < 2; ++c) {
        if (stats.cells[c].front().count < 2)
            throw data_error("rank_features: class \"" + ds.class_names[c] +
                             "\" has fewer than 2 rows");
    }

    const size_t n = ds.feature_count();
    std::vector<double> score(n, 0.0);
    for (size_t f = 0; f < n; ++f) {
        const auto& a = stats.cells[0][f];
        const auto& b = stats.cells[1][f];
        const double gap = std::abs(a.mean - b.mean);
        const double denom = std::sqrt(*a.variance / static_cast<double>(a.count) +
                                       *b.variance / static_cast<double>(b.count));
        if (denom == 0.0) {
            score[f] = (gap == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
            score[f] = gap / denom;
        }
    }

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        if (score[x] != score[y]) return score[x] > score[y];
        return x < y;
    });
    order.resize(k);
    return order;
}

Dataset select_features(const Dataset& ds, std::vector<size_t> indices) {
    std::sort(indices.begin(), indices.end());
    for (size_t i : indices) {
        if (i >= ds.feature_count())
            throw data_error("select_features: index " + std::to_string(i) + " out of range");
    }
    Dataset out;
    out.class_names = ds.class_names;
    for (size_t i : indices) out.feature_names.push_back(ds.feature_names[i]);
    out.rows.reserve(ds.rows.size());
    for (const DataRow& row : ds.rows) {
        DataRow r;
        r.id = row.id;
        r.label = row.label;
        for (size_t i : indices) r.features.push_back(row.features[i]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

namespace {

Dataset subset_by_flags(const Dataset& ds, const std::vector<char>& keep) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    for (size_t i = 0; i < ds.rows.size(); ++i) {
        if (keep[i]) out.rows.push_back(ds.rows[i]);
    }
    return out;
}

} // namespace

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw data_error("split: train_fraction must lie in (0,1)");
    if (ds.rows.empty()) throw data_error("split: empty dataset");

    std::vector<char> in_train(ds.rows.size(), 0);
    if (spec.stratified) {
        for (size_t c = 0; c < ds.class_names.size(); ++c) {
            std::vector<size_t> members;
            for (size_t i = 0; i < ds.rows.size(); ++i) {
                if (static_cast<size_t>(ds.rows[i].label) == c) members.push_back(i);
            }
            const auto take = static_cast<size_t>(
                std::llround(spec.train_fraction * static_cast<double>(members.size())));
            if (take == 0 || take == members.size())
                throw data_error("split: fraction " + fmt_double(spec.train_fraction) +
                                 " leaves an empty stratum for class \"" + ds.class_names[c] +
                                 "\"");
            SplitMix64 rng(derive_seed(spec.seed, {static_cast<uint64_t>(c)}));
            rng.shuffle(members);
            for (size_t j = 0; j < take; ++j) in_train[members[j]] = 1;
        }
    } else {
        std::vector<size_t> all(ds.rows.size());
        std::iota(all.begin(), all.end(), size_t{0});
        const auto take = static_cast<size_t>(
            std::llround(spec.train_fraction * static_cast<double>(all.size())));
        if (take == 0 || take == all.size())
            throw data_error("split: fraction leaves an empty part");
        SplitMix64 rng(derive_seed(spec.seed, {0xA11ull}));
        rng.shuffle(all);
        for (size_t j = 0; j < take; ++j) in_train[all[j]] = 1;
    }

    std::vector<char> in_test(ds.rows.size());
    for (size_t i = 0; i < ds.rows.size(); ++i) in_test[i] = in_train[i] ? 0 : 1;
    return {subset_by_flags(ds, in_train), subset_by_flags(ds, in_test)};
}

Dataset truncate_to_balance(const Dataset& ds, uint64_t seed) {
    if (ds.rows.empty()) throw data_error("truncate_to_balance: empty dataset");
    const std::vector<size_t> counts = ds.class_counts();
    const size_t target = *std::min_element(counts.begin(), counts.end());

    std::vector<char> keep(ds.rows.size(), 1);
    for (size_t c = 0; c < ds.class_names.size(); ++c) {
        if (counts[c] <= target) continue;
        std::vector<size_t> members;
        for (size_t i = 0; i < ds.rows.size(); ++i) {
            if (static_cast<size_t>(ds.rows[i].label) == c) members.push_back(i);
        }
        SplitMix64 rng(derive_seed(seed, {0x7C, static_cast<uint64_t>(c)}));
        rng.shuffle(members);
        for (size_t j = target; j < members.size(); ++j) keep[members[j]] = 0;
    }
    return subset_by_flags(ds, keep);
}

Normalizer normalize_fit(const Dataset& train) {
    if (train.rows.empty()) throw data_error("normalize_fit: empty dataset");
    const size_t n = train.feature_count();
    Normalizer nz;
    nz.feature_names = train.feature_names;
    nz.class_names = train.class_names;
    nz.mean.assign(n, 0.0);
    nz.stddev.assign(n, 0.0);
    nz.raw_min.assign(n, std::numeric_limits<double>::infinity());
    nz.raw_max.assign(n, -std::numeric_limits<double>::infinity());

    const auto rows = static_cast<double>(train.rows.size());
    for (size_t f = 0; f < n; ++f) {
        double sum = 0.0;
        for (const DataRow& row : train.rows) {
            sum += row.features[f];
            nz.raw_min[f] = std::min(nz.raw_min[f], row.features[f]);
            nz.raw_max[f] = std::max(nz.raw_max[f], row.features[f]);
        }
        nz.mean[f] = sum / rows;
        if (train.rows.size() >= 2) {
            double ss = 0.0;
            for (const DataRow& row : train.rows) {
                const double d = row.features[f] - nz.mean[f];
                ss += d * d;
            }
            nz.stddev[f] = std::sqrt(ss / (rows - 1.0));
        }
    }
    return nz;
}

Dataset normalize_apply(const Normalizer& nz, const Dataset& ds) {
    if (ds.feature_count() != nz.mean.size())
        throw data_error("normalize_apply: dataset has " + std::to_string(ds.feature_count()) +
                         " features, normalizer was fit on " + std::to_string(nz.mean.size()));
    Dataset out = ds;
    for (DataRow& row : out.rows) {
        for (size_t f = 0; f < row.features.size(); ++f) {
            const double centered = row.features[f] - nz.mean[f];
            row.features[f] = (nz.stddev[f] > 0.0) ? centered / nz.stddev[f] : centered;
        }
    }
    return out;
}

std::vector<double> denormalize(const Normalizer& nz, const std::vector<double>& x) {
    if (x.size() != nz.mean.size())
        throw data_error("denormalize: dimension mismatch");
    std::vector<double> out(x.size());
    for (size_t f = 0; f < x.size(); ++f) {
        out[f] = (nz.stddev[f] > 0.0) ? x[f] * nz.stddev[f] + nz.mean[f] : x[f] + nz.mean[f];
    }
    return out;
}

Dataset synth_longtail(const SynthConfig& config) {
    if (config.n_features == 0) throw data_error("synth_longtail: n_features must be positive");
    if (config.head_count < 2 || config.tail_count < 2)
        throw data_error("synth_longtail: class counts must be at least 2");

    SplitMix64 rng(derive_seed(config.seed, {0x5EED}));

    // Random unit direction separating the class means.
    std::vector<double> dir(config.n_features);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& d : dir) {
            d = rng.next_gaussian();
            norm += d * d;
        }
        norm = std::sqrt(norm);
    } while (norm == 0.0);
    for (double& d : dir) d /= norm;

    const double half = 0.5 * config.class_gap * config.spread;

    Dataset ds;
    ds.class_names = {"head", "tail"};
    for (size_t f = 0; f < config.n_features; ++f)
        ds.feature_names.push_back("f" + std::to_string(f + 1));

    size_t next_id = 1;
    auto emit = [&](int label, double sign, size_t count) {
        for (size_t i = 0; i < count; ++i) {
            DataRow row;
            row.id = "s" + std::to_string(next_id++);
            row.label = label;
            row.features.resize(config.n_features);
            for (size_t f = 0; f < config.n_features; ++f) {
                row.features[f] = sign * half * dir[f] + config.spread * rng.next_gaussian();
            }
            ds.rows.push_back(std::move(row));
        }
    };
    emit(0, -1.0, config.head_count);
    emit(1, +1.0, config.tail_count);
    return ds;
}

std::string dataset_fingerprint(const Dataset& ds) {
    std::ostringstream canon;
    for (const std::string& name : ds.feature_names) canon << name << '\x1f';
    canon << '\x1e';
    for (const std::string& name : ds.class_names) canon << name << '\x1f';
    canon << '\x1e';
    for (const DataRow& row : ds.rows) {
        canon << row.id << '\x1f' << row.label << '\x1f';
        for (double v : row.features) canon << fmt_double(v) << '\x1f';
        canon << '\x1e';
    }
    const uint64_t h = fnv1a64(canon.str());
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xF];
    buf[16] = '\0';
    return std::string(buf);
}

} // namespace nodebias
