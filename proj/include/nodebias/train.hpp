#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodebias/data.hpp"
#include "nodebias/model.hpp"

namespace nodebias {

struct TrainConfig {
    int hidden_width = 10;
    double learning_rate = 0.05;
    int epochs = 2000;
    uint64_t seed = 0;
    double early_stop_at_train_accuracy = 1.0;
    double l2 = 0.0;
};

struct TrainTrace {
    std::vector<double> losses; // one entry per evaluated epoch
    int epochs_run = 0;
    bool early_stopped = false;
    double final_train_accuracy = 0.0;
};

struct RunEntry {
    uint64_t seed = 0;
    Network network;
    ValidationSummary validation;
};

struct RunSet {
    std::vector<RunEntry> entries;
    std::string dataset_fingerprint;
    TrainConfig config;
};

// Gradients in the same shape as the network parameters.
struct Gradients {
    std::vector<std::vector<std::vector<double>>> weights;
    std::vector<std::vector<double>> bias;
};

// Softmax cross-entropy over the full batch plus an L2 penalty on weights:
//   mean_i (logsumexp(z_i) - z_i[y_i]) + l2/2 * sum(w^2)
// Fills `grad` when non-null. Label accuracy of the current parameters is
// written to `accuracy` when non-null.
double batch_loss(const Network& net, const Dataset& train, double l2, Gradients* grad,
                  double* accuracy);

// Full-batch gradient descent from He-uniform initialization. Deterministic
// given (train, cfg): initialization order, batch order and accumulation
// order are all fixed.
Network train_one(const Dataset& train, const TrainConfig& cfg, TrainTrace* trace = nullptr);

// One network per seed, validated against `test`. Seeds must be distinct.
RunSet train_runs(const Dataset& train, const Dataset& test, const TrainConfig& cfg,
                  const std::vector<uint64_t>& seeds);

Network he_uniform_init(int input_dim, int hidden_width, int class_count, uint64_t seed);

} // namespace nodebias
