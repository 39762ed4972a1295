#include "nodebias/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "nodebias/data.hpp"
#include "nodebias/errors.hpp"

namespace nodebias {

std::string to_string(Activation a) {
    return a == Activation::relu ? "relu" : "identity";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "identity") return Activation::identity;
    throw data_error("unsupported activation \"" + s + "\" (expected \"relu\" or \"identity\")");
}

void check_network(const Network& net, const std::string& where) {
    if (net.input_dim < 1) throw data_error(where + ": input_dim must be positive");
    if (net.class_count < 2) throw data_error(where + ": class_count must be at least 2");
    if (net.layers.empty()) throw data_error(where + ": network has no layers");

    size_t prev = static_cast<size_t>(net.input_dim);
    for (size_t k = 0; k < net.layers.size(); ++k) {
        const Layer& layer = net.layers[k];
        const std::string tag = where + ": layers[" + std::to_string(k) + "]";
        if (layer.weights.empty()) throw data_error(tag + ".weights is empty");
        const size_t cols = layer.weights.front().size();
        for (size_t r = 0; r < layer.weights.size(); ++r) {
            if (layer.weights[r].size() != cols)
                throw data_error(tag + ".weights[" + std::to_string(r) + "] is ragged");
            for (size_t c = 0; c < cols; ++c) {
                if (!std::isfinite(layer.weights[r][c]))
                    throw data_error(tag + ".weights[" + std::to_string(r) + "][" +
                                     std::to_string(c) + "] is not finite");
            }
        }
        if (cols != prev)
            throw data_error(tag + ".weights has " + std::to_string(cols) +
                             " columns, expected " + std::to_string(prev));
        if (layer.bias.size() != layer.weights.size())
            throw data_error(tag + ".bias has length " + std::to_string(layer.bias.size()) +
                             ", expected " + std::to_string(layer.weights.size()));
        for (size_t r = 0; r < layer.bias.size(); ++r) {
            if (!std::isfinite(layer.bias[r]))
                throw data_error(tag + ".bias[" + std::to_string(r) + "] is not finite");
        }
        const bool final_layer = (k + 1 == net.layers.size());
        if (final_layer && layer.activation != Activation::identity)
            throw data_error(tag + ": final layer activation must be identity");
        if (!final_layer && layer.activation != Activation::relu)
            throw data_error(tag + ": hidden layer activation must be relu");
        prev = layer.weights.size();
    }
    if (prev != static_cast<size_t>(net.class_count))
        throw data_error(where + ": final layer emits " + std::to_string(prev) +
                         " outputs, expected class_count " + std::to_string(net.class_count));
}

int argmax_lowest(std::span<const double> v) {
    int best = 0;
    for (size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[static_cast<size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

namespace {

// Affine map then activation, accumulating left to right in index order.
void apply_layer(const Layer& layer, const std::vector<double>& in, std::vector<double>& out) {
    const size_t rows = layer.weights.size();
    out.resize(rows);
    for (size_t r = 0; r < rows; ++r) {
        const std::vector<double>& w = layer.weights[r];
        double acc = layer.bias[r];
        for (size_t c = 0; c < w.size(); ++c) acc += w[c] * in[c];
        out[r] = (layer.activation == Activation::relu && acc < 0.0) ? 0.0 : acc;
    }
}

} // namespace

int forward_label(const Network& net, std::span<const double> x, ForwardWorkspace& ws) {
    ws.a.assign(x.begin(), x.end());
    for (const Layer& layer : net.layers) {
        apply_layer(layer, ws.a, ws.b);
        std::swap(ws.a, ws.b);
    }
    return argmax_lowest(ws.a);
}

Prediction forward(const Network& net, std::span<const double> x) {
    if (x.size() != static_cast<size_t>(net.input_dim))
        throw data_error("forward: input has " + std::to_string(x.size()) +
                         " components, network expects " + std::to_string(net.input_dim));
    for (size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]))
            throw data_error("forward: input component " + std::to_string(i) + " is not finite");
    }
    ForwardWorkspace ws;
    Prediction p;
    p.label = forward_label(net, x, ws);
    p.logits = std::move(ws.a);
    return p;
}

Network load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("model file " + path + " is not valid JSON: " + e.what());
    }

    Network net;
    try {
        net.input_dim = j.at("input_dim").get<int>();
        net.class_count = j.at("class_count").get<int>();
        for (const auto& lj : j.at("layers")) {
            Layer layer;
            layer.weights = lj.at("weights").get<std::vector<std::vector<double>>>();
            layer.bias = lj.at("bias").get<std::vector<double>>();
            layer.activation = activation_from_string(lj.at("activation").get<std::string>());
            net.layers.push_back(std::move(layer));
        }
        if (j.contains("meta"))
            net.meta = j.at("meta").get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw data_error("model file " + path + " violates the model schema: " + e.what());
    }
    check_network(net, path);
    return net;
}

void save_model(const Network& net, const std::string& path) {
    check_network(net, "save_model");
    nlohmann::json j;
    j["input_dim"] = net.input_dim;
    j["class_count"] = net.class_count;
    j["layers"] = nlohmann::json::array();
    for (const Layer& layer : net.layers) {
        nlohmann::json lj;
        lj["weights"] = layer.weights;
        lj["bias"] = layer.bias;
        lj["activation"] = to_string(layer.activation);
        j["layers"].push_back(std::move(lj));
    }
    j["meta"] = net.meta;

    std::ofstream out(path);
    if (!out) throw data_error("cannot write model file: " + path);
    out << j.dump(2) << "\n";
}

ValidationSummary validate_model(const Network& net, const Dataset& test) {
    if (test.rows.empty()) throw data_error("validate_model: empty test set");
    if (test.feature_count() != static_cast<size_t>(net.input_dim))
        throw data_error("validate_model: test set has " + std::to_string(test.feature_count()) +
                         " features, network expects " + std::to_string(net.input_dim));

    ValidationSummary summary;
    summary.total = test.rows.size();
    summary.per_class.resize(test.class_names.size());
    for (size_t c = 0; c < test.class_names.size(); ++c)
        summary.per_class[c].class_name = test.class_names[c];

    ForwardWorkspace ws;
    for (const DataRow& row : test.rows) {
        const int predicted = forward_label(net, row.features, ws);
        auto& pc = summary.per_class[static_cast<size_t>(row.label)];
        pc.count += 1;
        if (predicted == row.label) {
            summary.correct += 1;
            pc.correct += 1;
        } else {
            summary.misclassified_ids.push_back(row.id);
        }
    }
    summary.accuracy = static_cast<double>(summary.correct) / static_cast<double>(summary.total);
    for (auto& pc : summary.per_class) {
        if (pc.count > 0)
            pc.accuracy = static_cast<double>(pc.correct) / static_cast<double>(pc.count);
    }
    return summary;
}

} // namespace nodebias
