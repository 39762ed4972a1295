#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nodebias {

struct Dataset;

enum class Activation { relu, identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct Layer {
    // weights[r][c] multiplies input component c into output component r.
    std::vector<std::vector<double>> weights;
    std::vector<double> bias;
    Activation activation = Activation::relu;

    size_t out_dim() const { return weights.size(); }
    size_t in_dim() const { return weights.empty() ? 0 : weights.front().size(); }
};

// Feedforward ReLU classifier with argmax readout. Immutable once built;
// forward passes are pure and safe to run from many threads.
struct Network {
    std::vector<Layer> layers;
    int input_dim = 0;
    int class_count = 0;
    std::map<std::string, std::string> meta;
};

struct Prediction {
    std::vector<double> logits;
    int label = 0; // argmax, ties broken toward the lowest class index
};

struct ValidationSummary {
    size_t total = 0;
    size_t correct = 0;
    double accuracy = 0.0;
    struct PerClass {
        std::string class_name;
        size_t count = 0;
        size_t correct = 0;
        double accuracy = 0.0; // meaningful only when count > 0
    };
    std::vector<PerClass> per_class;
    std::vector<std::string> misclassified_ids;
};

// Checks the structural invariants (dimension chain, activations, finiteness).
// `where` prefixes error messages, e.g. a file path.
void check_network(const Network& net, const std::string& where = "network");

// Reusable buffers for the enumeration hot path.
struct ForwardWorkspace {
    std::vector<double> a;
    std::vector<double> b;
};

Prediction forward(const Network& net, std::span<const double> x);
int forward_label(const Network& net, std::span<const double> x, ForwardWorkspace& ws);

int argmax_lowest(std::span<const double> v);

Network load_model(const std::string& path);
void save_model(const Network& net, const std::string& path);

ValidationSummary validate_model(const Network& net, const Dataset& test);

} // namespace nodebias
