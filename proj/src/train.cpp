#include "nodebias/train.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nodebias/errors.hpp"
#include "nodebias/rng.hpp"
#include "nodebias/util.hpp"

namespace nodebias {

Network he_uniform_init(int input_dim, int hidden_width, int class_count, uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, {0x1217}));
    Network net;
    net.input_dim = input_dim;
    net.class_count = class_count;

    auto make_layer = [&](size_t out_dim, size_t in_dim, Activation act) {
        Layer layer;
        layer.activation = act;
        layer.bias.assign(out_dim, 0.0);
        layer.weights.assign(out_dim, std::vector<double>(in_dim, 0.0));
        const double limit = std::sqrt(6.0 / static_cast<double>(in_dim));
        for (size_t r = 0; r < out_dim; ++r) {
            for (size_t c = 0; c < in_dim; ++c) {
                layer.weights[r][c] = rng.next_symmetric(limit);
            }
        }
        return layer;
    };

    net.layers.push_back(make_layer(static_cast<size_t>(hidden_width),
                                    static_cast<size_t>(input_dim), Activation::relu));
    net.layers.push_back(make_layer(static_cast<size_t>(class_count),
                                    static_cast<size_t>(hidden_width), Activation::identity));
    return net;
}

double batch_loss(const Network& net, const Dataset& train, double l2, Gradients* grad,
                  double* accuracy) {
    const size_t batch = train.rows.size();
    const size_t n_layers = net.layers.size();
    const auto inv_batch = 1.0 / static_cast<double>(batch);

    if (grad) {
        grad->weights.assign(n_layers, {});
        grad->bias.assign(n_layers, {});
        for (size_t k = 0; k < n_layers; ++k) {
            grad->weights[k].assign(net.layers[k].out_dim(),
                                    std::vector<double>(net.layers[k].in_dim(), 0.0));
            grad->bias[k].assign(net.layers[k].out_dim(), 0.0);
        }
    }

    double loss = 0.0;
    size_t correct = 0;

    // Per-row activations: acts[0] = input, acts[k+1] = output of layer k.
    std::vector<std::vector<double>> acts(n_layers + 1);
    std::vector<double> delta, delta_prev;

    for (const DataRow& row : train.rows) {
        acts[0] = row.features;
        for (size_t k = 0; k < n_layers; ++k) {
            const Layer& layer = net.layers[k];
            acts[k + 1].assign(layer.out_dim(), 0.0);
            for (size_t r = 0; r < layer.out_dim(); ++r) {
                double acc = layer.bias[r];
                const auto& w = layer.weights[r];
                for (size_t c = 0; c < w.size(); ++c) acc += w[c] * acts[k][c];
                acts[k + 1][r] =
                    (layer.activation == Activation::relu && acc < 0.0) ? 0.0 : acc;
            }
        }

        const std::vector<double>& z = acts[n_layers];
        const int label = row.label;
        const int predicted = argmax_lowest(z);
        if (predicted == label) ++correct;

        // Log-sum-exp stabilized cross-entropy.
        const double zmax = *std::max_element(z.begin(), z.end());
        double sum_exp = 0.0;
        for (double v : z) sum_exp += std::exp(v - zmax);
        loss += inv_batch * (zmax + std::log(sum_exp) - z[static_cast<size_t>(label)]);

        if (!grad) continue;

        delta.assign(z.size(), 0.0);
        for (size_t j = 0; j < z.size(); ++j) {
            const double softmax = std::exp(z[j] - zmax) / sum_exp;
            delta[j] = inv_batch * (softmax - (static_cast<int>(j) == label ? 1.0 : 0.0));
        }

        for (size_t k = n_layers; k-- > 0;) {
            const Layer& layer = net.layers[k];
            const std::vector<double>& in = acts[k];
            for (size_t r = 0; r < layer.out_dim(); ++r) {
                grad->bias[k][r] += delta[r];
                auto& gw = grad->weights[k][r];
                for (size_t c = 0; c < in.size(); ++c) gw[c] += delta[r] * in[c];
            }
            if (k == 0) break;
            delta_prev.assign(layer.in_dim(), 0.0);
            for (size_t r = 0; r < layer.out_dim(); ++r) {
                for (size_t c = 0; c < layer.in_dim(); ++c) {
                    delta_prev[c] += layer.weights[r][c] * delta[r];
                }
            }
            // ReLU subgradient, 0 at the kink.
            for (size_t c = 0; c < layer.in_dim(); ++c) {
                if (acts[k][c] <= 0.0 && net.layers[k - 1].activation == Activation::relu)
                    delta_prev[c] = 0.0;
            }
            delta.swap(delta_prev);
        }
    }

    if (l2 > 0.0) {
        double sq = 0.0;
        for (size_t k = 0; k < n_layers; ++k) {
            for (size_t r = 0; r < net.layers[k].out_dim(); ++r) {
                for (size_t c = 0; c < net.layers[k].in_dim(); ++c) {
                    const double w = net.layers[k].weights[r][c];
                    sq += w * w;
                    if (grad) grad->weights[k][r][c] += l2 * w;
                }
            }
        }
        loss += 0.5 * l2 * sq;
    }

    if (accuracy) *accuracy = static_cast<double>(correct) / static_cast<double>(batch);
    return loss;
}

Network train_one(const Dataset& train, const TrainConfig& cfg, TrainTrace* trace) {
    if (cfg.hidden_width < 1) throw config_error("train: hidden_width must be positive");
    if (cfg.learning_rate < 0.0) throw config_error("train: learning_rate must be nonnegative");
    if (cfg.epochs < 1) throw config_error("train: epochs must be positive");
    if (!(cfg.early_stop_at_train_accuracy > 0.0 && cfg.early_stop_at_train_accuracy <= 1.0))
        throw config_error("train: early_stop_at_train_accuracy must lie in (0,1]");
    if (cfg.l2 < 0.0) throw config_error("train: l2 must be nonnegative");
    if (train.rows.empty()) throw data_error("train: empty training set");
    const std::vector<size_t> counts = train.class_counts();
    for (size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0)
            throw data_error("train: class \"" + train.class_names[c] + "\" has no rows");
    }

    Network net = he_uniform_init(static_cast<int>(train.feature_count()), cfg.hidden_width,
                                  static_cast<int>(train.class_count()), cfg.seed);

    Gradients grad;
    double accuracy = 0.0;
    int epochs_run = 0;
    bool early = false;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double loss = batch_loss(net, train, cfg.l2, &grad, &accuracy);
        if (!std::isfinite(loss))
            throw numeric_error("training diverged (non-finite loss) at epoch " +
                                std::to_string(epoch));
        if (trace) trace->losses.push_back(loss);
        epochs_run = epoch;
        if (accuracy >= cfg.early_stop_at_train_accuracy) {
            early = true;
            break;
        }
        bool finite = true;
        for (size_t k = 0; k < net.layers.size(); ++k) {
            Layer& layer = net.layers[k];
            for (size_t r = 0; r < layer.out_dim(); ++r) {
                layer.bias[r] -= cfg.learning_rate * grad.bias[k][r];
                finite = finite && std::isfinite(layer.bias[r]);
                for (size_t c = 0; c < layer.in_dim(); ++c) {
                    layer.weights[r][c] -= cfg.learning_rate * grad.weights[k][r][c];
                    finite = finite && std::isfinite(layer.weights[r][c]);
                }
            }
        }
        if (!finite)
            throw numeric_error("training diverged (non-finite parameters) at epoch " +
                                std::to_string(epoch));
    }

    if (trace) {
        trace->epochs_run = epochs_run;
        trace->early_stopped = early;
        trace->final_train_accuracy = accuracy;
    }

    net.meta["seed"] = std::to_string(cfg.seed);
    net.meta["dataset_fingerprint"] = dataset_fingerprint(train);
    net.meta["hidden_width"] = std::to_string(cfg.hidden_width);
    net.meta["epochs_run"] = std::to_string(epochs_run);
    net.meta["train_accuracy"] = fmt_double(accuracy);
    return net;
}

RunSet train_runs(const Dataset& train, const Dataset& test, const TrainConfig& cfg,
                  const std::vector<uint64_t>& seeds) {
    std::set<uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw config_error("train_runs: seeds must be distinct");

    RunSet runs;
    runs.config = cfg;
    runs.dataset_fingerprint = dataset_fingerprint(train);
    for (uint64_t seed : seeds) {
        TrainConfig one = cfg;
        one.seed = seed;
        RunEntry entry;
        entry.seed = seed;
        entry.network = train_one(train, one);
        entry.validation = validate_model(entry.network, test);
        runs.entries.push_back(std::move(entry));
    }
    return runs;
}

} // namespace nodebias
