#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nodebias/data.hpp"
#include "nodebias/model.hpp"
#include "nodebias/rng.hpp"

namespace testutil {

inline nodebias::Network random_network(nodebias::SplitMix64& rng, int input_dim, int hidden,
                                        int classes, double scale = 1.0) {
    nodebias::Network net;
    net.input_dim = input_dim;
    net.class_count = classes;
    auto layer = [&](int out_dim, int in_dim, nodebias::Activation act) {
        nodebias::Layer l;
        l.activation = act;
        l.weights.assign(static_cast<size_t>(out_dim),
                         std::vector<double>(static_cast<size_t>(in_dim), 0.0));
        l.bias.assign(static_cast<size_t>(out_dim), 0.0);
        for (auto& row : l.weights) {
            for (double& w : row) w = rng.next_symmetric(scale);
        }
        for (double& b : l.bias) b = rng.next_symmetric(scale * 0.5);
        return l;
    };
    net.layers.push_back(layer(hidden, input_dim, nodebias::Activation::relu));
    net.layers.push_back(layer(classes, hidden, nodebias::Activation::identity));
    return net;
}

inline std::vector<double> random_point(nodebias::SplitMix64& rng, size_t n, double scale = 1.0) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.next_symmetric(scale);
    return x;
}

inline nodebias::Dataset random_dataset(nodebias::SplitMix64& rng, size_t rows, size_t features,
                                        size_t classes) {
    nodebias::Dataset ds;
    for (size_t f = 0; f < features; ++f) ds.feature_names.push_back("f" + std::to_string(f + 1));
    for (size_t c = 0; c < classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    for (size_t r = 0; r < rows; ++r) {
        nodebias::DataRow row;
        row.id = "r" + std::to_string(r + 1);
        row.label = static_cast<int>(r % classes); // every class populated
        row.features = random_point(rng, features, 3.0);
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

// Fresh scratch directory under the build tree, wiped on construction.
class TempDir {
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() / ("nodebias_test_" + name)) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path_.string() : (path_ / rel).string();
    }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

} // namespace testutil
