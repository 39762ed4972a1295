#include "nodebias/perturb.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nodebias/errors.hpp"
#include "nodebias/rng.hpp"
#include "nodebias/util.hpp"

namespace nodebias {

std::string to_string(Polarity p) {
    switch (p) {
        case Polarity::positive: return "positive";
        case Polarity::negative: return "negative";
        case Polarity::symmetric: return "symmetric";
    }
    return "symmetric";
}

Polarity polarity_from_string(const std::string& s) {
    if (s == "positive") return Polarity::positive;
    if (s == "negative") return Polarity::negative;
    if (s == "symmetric") return Polarity::symmetric;
    throw config_error("unknown polarity \"" + s + "\"");
}

namespace {

void check_sweep(const NoiseSweep& sweep) {
    if (!(sweep.step > 0.0)) throw config_error("noise sweep: step must be positive");
    if (sweep.max_level < 1) throw config_error("noise sweep: max_level must be positive");
}

void check_level(const NoiseSweep& sweep, int level) {
    if (level < 1 || level > sweep.max_level)
        throw config_error("noise level " + std::to_string(level) + " outside [1, " +
                           std::to_string(sweep.max_level) + "]");
}

void check_seed_input(const SeedInput& seed, const Network& net) {
    if (!seed.correctly_classified)
        throw data_error("seed input \"" + seed.id +
                         "\" is not correctly classified; it cannot enter a preservation query");
    if (seed.x.size() != static_cast<size_t>(net.input_dim))
        throw data_error("seed input \"" + seed.id + "\" has dimension " +
                         std::to_string(seed.x.size()) + ", network expects " +
                         std::to_string(net.input_dim));
}

} // namespace

std::vector<double> grid(const NoiseSweep& sweep, int level) {
    check_sweep(sweep);
    check_level(sweep, level);
    std::vector<double> offsets;
    if (sweep.polarity != Polarity::positive) {
        for (int j = level; j >= 1; --j) offsets.push_back(-static_cast<double>(j) * sweep.step);
    }
    if (sweep.polarity != Polarity::negative) {
        for (int j = 1; j <= level; ++j) offsets.push_back(static_cast<double>(j) * sweep.step);
    }
    return offsets;
}

uint64_t joint_grid_size(const NoiseSweep& sweep, int level, size_t n_nodes, uint64_t cap) {
    const uint64_t per_node =
        (sweep.polarity == Polarity::symmetric) ? 2ull * static_cast<uint64_t>(level)
                                                : static_cast<uint64_t>(level);
    unsigned __int128 total = 1;
    for (size_t i = 0; i < n_nodes; ++i) {
        total *= per_node;
        if (total > cap) return cap + 1;
    }
    return static_cast<uint64_t>(total);
}

WilsonInterval wilson95(uint64_t preserved, uint64_t total) {
    const double z = 1.959963984540054;
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(preserved) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval w;
    w.low = (preserved == 0) ? 0.0 : std::max(0.0, center - half);
    w.high = (preserved == total) ? 1.0 : std::min(1.0, center + half);
    return w;
}

PreservationCount preserve_single_node(const Network& net, const SeedInput& seed, int node,
                                       const NoiseSweep& sweep, int level) {
    check_seed_input(seed, net);
    if (node < 0 || node >= net.input_dim)
        throw data_error("node index " + std::to_string(node) + " out of range");

    const std::vector<double> offsets = grid(sweep, level);
    ForwardWorkspace ws;
    const int base = forward_label(net, seed.x, ws);

    std::vector<double> x = seed.x;
    PreservationCount count;
    count.total = offsets.size();
    for (double off : offsets) {
        x[static_cast<size_t>(node)] = seed.x[static_cast<size_t>(node)] + off;
        if (forward_label(net, x, ws) == base) count.preserved += 1;
    }
    return count;
}

AllNodesResult preserve_all_nodes(const Network& net, const SeedInput& seed,
                                  const NoiseSweep& sweep, int level, uint64_t budget,
                                  uint64_t mc_samples, uint64_t mc_seed) {
    check_seed_input(seed, net);
    if (budget < 1) throw config_error("preserve_all_nodes: budget must be positive");
    if (mc_samples < 1) throw config_error("preserve_all_nodes: mc_samples must be positive");

    const std::vector<double> offsets = grid(sweep, level);
    const size_t n = seed.x.size();
    const size_t g = offsets.size();
    const uint64_t joint = joint_grid_size(sweep, level, n, budget);

    ForwardWorkspace ws;
    const int base = forward_label(net, seed.x, ws);
    std::vector<double> x = seed.x;

    AllNodesResult result;
    if (joint <= budget) {
        result.method = PreserveMethod::exact;
        result.count.total = joint;
        // Odometer over per-node offset indices, node 0 most significant.
        std::vector<size_t> idx(n, 0);
        for (size_t i = 0; i < n; ++i) x[i] = seed.x[i] + offsets[0];
        for (;;) {
            if (forward_label(net, x, ws) == base) result.count.preserved += 1;
            size_t pos = n;
            while (pos > 0) {
                --pos;
                if (++idx[pos] < g) {
                    x[pos] = seed.x[pos] + offsets[idx[pos]];
                    break;
                }
                idx[pos] = 0;
                x[pos] = seed.x[pos] + offsets[0];
                if (pos == 0) {
                    pos = n; // odometer wrapped: done
                    break;
                }
            }
            if (pos == n || n == 0) break;
        }
    } else {
        result.method = PreserveMethod::monte_carlo;
        result.count.total = mc_samples;
        SplitMix64 rng(derive_seed(mc_seed, {fnv1a64(seed.id), static_cast<uint64_t>(level)}));
        for (uint64_t s = 0; s < mc_samples; ++s) {
            for (size_t i = 0; i < n; ++i) {
                x[i] = seed.x[i] + offsets[static_cast<size_t>(rng.next_below(g))];
            }
            if (forward_label(net, x, ws) == base) result.count.preserved += 1;
        }
    }
    result.wilson = wilson95(result.count.preserved, result.count.total);
    return result;
}

bool worst_case_robust(const Network& net, const SeedInput& seed, const NoiseSweep& sweep,
                       int level, uint64_t budget) {
    if (!sweep.target.is_all()) {
        const PreservationCount c =
            preserve_single_node(net, seed, sweep.target.node, sweep, level);
        return c.preserved == c.total;
    }
    const uint64_t joint = joint_grid_size(sweep, level, seed.x.size(), budget);
    if (joint > budget)
        throw numeric_error("worst_case_robust: exhaustive check infeasible, joint grid exceeds "
                            "budget " + std::to_string(budget));
    const AllNodesResult r = preserve_all_nodes(net, seed, sweep, level, budget);
    return r.count.preserved == r.count.total;
}

std::string props_path_for(const std::string& model_path) {
    const size_t dot = model_path.find_last_of('.');
    const size_t sep = model_path.find_last_of('/');
    if (dot != std::string::npos && (sep == std::string::npos || dot > sep))
        return model_path.substr(0, dot) + ".props";
    return model_path + ".props";
}

namespace {

// Enumerates per-point preservation outcomes in deterministic order.
std::vector<bool> enumerate_outcomes(const Network& net, const SeedInput& seed,
                                     const NoiseSweep& sweep, int level, uint64_t budget) {
    const std::vector<double> offsets = grid(sweep, level);
    ForwardWorkspace ws;
    const int base = forward_label(net, seed.x, ws);
    std::vector<bool> outcomes;
    std::vector<double> x = seed.x;

    if (!sweep.target.is_all()) {
        const int node = sweep.target.node;
        if (node < 0 || node >= net.input_dim)
            throw data_error("node index " + std::to_string(node) + " out of range");
        for (double off : offsets) {
            x[static_cast<size_t>(node)] = seed.x[static_cast<size_t>(node)] + off;
            outcomes.push_back(forward_label(net, x, ws) == base);
        }
        return outcomes;
    }

    const size_t n = seed.x.size();
    const size_t g = offsets.size();
    const uint64_t joint = joint_grid_size(sweep, level, n, budget);
    if (joint > budget)
        throw numeric_error("dtmc export: joint grid exceeds budget " + std::to_string(budget));
    outcomes.reserve(joint);
    std::vector<size_t> idx(n, 0);
    for (size_t i = 0; i < n; ++i) x[i] = seed.x[i] + offsets[0];
    for (;;) {
        outcomes.push_back(forward_label(net, x, ws) == base);
        size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < g) {
                x[pos] = seed.x[pos] + offsets[idx[pos]];
                break;
            }
            idx[pos] = 0;
            x[pos] = seed.x[pos] + offsets[0];
            if (pos == 0) {
                pos = n;
                break;
            }
        }
        if (pos == n) break;
    }
    return outcomes;
}

} // namespace

PreservationCount export_dtmc(const Network& net, const SeedInput& seed, const NoiseSweep& sweep,
                              int level, const std::string& path, uint64_t budget) {
    check_seed_input(seed, net);
    const std::vector<bool> outcomes = enumerate_outcomes(net, seed, sweep, level, budget);
    const size_t total = outcomes.size();
    const size_t preserved_state = total + 1;
    const size_t changed_state = total + 2;

    std::ofstream out(path);
    if (!out) throw data_error("cannot write dtmc file: " + path);

    out << "// discretized noise preservation experiment\n";
    out << "// input id: " << seed.id << "\n";
    if (sweep.target.is_all()) out << "// target: all nodes (joint grid)\n";
    else out << "// target: node " << sweep.target.node << "\n";
    out << "// polarity: " << to_string(sweep.polarity) << ", step: " << fmt_double(sweep.step)
        << ", level: " << level << "\n";
    out << "dtmc\n\n";
    out << "module perturbation\n";
    out << "  s : [0.." << changed_state << "] init 0;\n\n";
    out << "  [] s=0 ->";
    for (size_t k = 1; k <= total; ++k) {
        out << (k == 1 ? " " : " + ") << "1/" << total << " : (s'=" << k << ")";
    }
    out << ";\n";
    for (size_t k = 1; k <= total; ++k) {
        out << "  [] s=" << k << " -> 1 : (s'="
            << (outcomes[k - 1] ? preserved_state : changed_state) << ");\n";
    }
    out << "  [] s=" << preserved_state << " -> 1 : (s'=" << preserved_state << ");\n";
    out << "  [] s=" << changed_state << " -> 1 : (s'=" << changed_state << ");\n";
    out << "endmodule\n\n";
    out << "label \"preserved\" = s=" << preserved_state << ";\n";
    out << "label \"changed\" = s=" << changed_state << ";\n";
    out.close();

    std::ofstream props(props_path_for(path));
    if (!props) throw data_error("cannot write props file: " + props_path_for(path));
    props << "P=? [ F \"preserved\" ]\n";

    PreservationCount count;
    count.total = total;
    for (bool ok : outcomes) count.preserved += ok ? 1 : 0;
    return count;
}

PreservationCount parse_dtmc(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open dtmc file: " + path);

    // Recover "preserved" state id from the label line, then count the
    // non-initial, non-absorbing commands that move into it.
    long preserved_state = -1;
    std::vector<std::pair<long, long>> commands; // (source, target) for prob-1 moves
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "label") {
            std::string name;
            ls >> name;
            if (name == "\"preserved\"") {
                const size_t eq = line.rfind("s=");
                if (eq == std::string::npos) throw data_error(path + ": malformed preserved label");
                preserved_state = std::stol(line.substr(eq + 2));
            }
        } else if (tok == "[]") {
            // form: [] s=SRC -> 1 : (s'=DST); (initial state uses many branches)
            std::string src_tok;
            ls >> src_tok;
            if (src_tok.rfind("s=", 0) != 0) throw data_error(path + ": malformed command");
            const long src = std::stol(src_tok.substr(2));
            if (src == 0) continue;
            const size_t arrow = line.find("-> 1 :");
            const size_t dst_pos = line.find("(s'=");
            if (arrow == std::string::npos || dst_pos == std::string::npos)
                throw data_error(path + ": malformed transition for state " + std::to_string(src));
            const long dst = std::stol(line.substr(dst_pos + 4));
            commands.emplace_back(src, dst);
        }
    }
    if (preserved_state < 0) throw data_error(path + ": missing preserved label");

    PreservationCount count;
    for (const auto& [src, dst] : commands) {
        if (src == preserved_state || src == preserved_state + 1) continue; // absorbing loops
        count.total += 1;
        if (dst == preserved_state) count.preserved += 1;
    }
    if (count.total == 0) throw data_error(path + ": no grid transitions found");
    return count;
}

std::vector<SeedInput> make_seed_inputs(const Network& net, const Dataset& test_normalized) {
    std::vector<SeedInput> seeds;
    seeds.reserve(test_normalized.rows.size());
    ForwardWorkspace ws;
    for (const DataRow& row : test_normalized.rows) {
        SeedInput s;
        s.id = row.id;
        s.x = row.features;
        s.class_label = row.label;
        s.correctly_classified = (forward_label(net, s.x, ws) == row.label);
        seeds.push_back(std::move(s));
    }
    return seeds;
}

} // namespace nodebias
