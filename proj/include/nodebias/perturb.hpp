#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodebias/data.hpp"
#include "nodebias/model.hpp"
#include "nodebias/ratio.hpp"

namespace nodebias {

enum class Polarity { positive, negative, symmetric };

std::string to_string(Polarity p);
Polarity polarity_from_string(const std::string& s);

struct SweepTarget {
    int node = -1; // -1 means all nodes
    static SweepTarget all_nodes() { return SweepTarget{}; }
    static SweepTarget single_node(int i) { return SweepTarget{i}; }
    bool is_all() const { return node < 0; }
    bool operator==(const SweepTarget&) const = default;
};

// Nested discretized offset grids: level t admits {j*step : 1 <= |j| <= t}
// filtered by polarity. Offset 0 never appears, and grid(t) is a subset of
// grid(t+1).
struct NoiseSweep {
    double step = 0.05;
    int max_level = 10;
    Polarity polarity = Polarity::symmetric;
    SweepTarget target = SweepTarget::all_nodes();
};

struct PreservationCount {
    uint64_t preserved = 0;
    uint64_t total = 0;
    Ratio ratio() const { return Ratio::of_counts(preserved, total); }
    double probability() const { return static_cast<double>(preserved) / static_cast<double>(total); }
};

struct SeedInput {
    std::string id;
    std::vector<double> x; // normalized feature space
    int class_label = 0;
    bool correctly_classified = false;
};

enum class PreserveMethod { exact, monte_carlo };

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

struct AllNodesResult {
    PreservationCount count;
    PreserveMethod method = PreserveMethod::exact;
    WilsonInterval wilson;
};

constexpr uint64_t kDefaultBudget = 1000000;
constexpr uint64_t kDefaultMcSamples = 10000;

std::vector<double> grid(const NoiseSweep& sweep, int level);

// Number of joint grid points at `level`, saturated at `cap + 1`.
uint64_t joint_grid_size(const NoiseSweep& sweep, int level, size_t n_nodes, uint64_t cap);

WilsonInterval wilson95(uint64_t preserved, uint64_t total);

// Exact enumeration of a single node's offsets; counts the offsets under
// which the classification of the seed survives.
PreservationCount preserve_single_node(const Network& net, const SeedInput& seed, int node,
                                       const NoiseSweep& sweep, int level);

// Cartesian product over all nodes' grids when it fits in `budget`;
// otherwise a seeded Monte-Carlo estimate with `mc_samples` draws. The
// sampling stream is derived from (mc_seed, seed.id, level), so results do
// not depend on scheduling.
AllNodesResult preserve_all_nodes(const Network& net, const SeedInput& seed,
                                  const NoiseSweep& sweep, int level,
                                  uint64_t budget = kDefaultBudget,
                                  uint64_t mc_samples = kDefaultMcSamples,
                                  uint64_t mc_seed = 0);

// True iff every grid point preserves the classification. Never samples;
// an over-budget joint grid is an error.
bool worst_case_robust(const Network& net, const SeedInput& seed, const NoiseSweep& sweep,
                       int level, uint64_t budget = kDefaultBudget);

// Writes a PRISM-language DTMC (uniform initial choice over grid points,
// each branch reaching an absorbing preserved/changed state) plus a sibling
// .props file with the query P=? [ F "preserved" ].
PreservationCount export_dtmc(const Network& net, const SeedInput& seed, const NoiseSweep& sweep,
                              int level, const std::string& path,
                              uint64_t budget = kDefaultBudget);

// Re-reads a file written by export_dtmc and recovers the preserved/total
// counts from the transition structure alone.
PreservationCount parse_dtmc(const std::string& path);

std::string props_path_for(const std::string& model_path);

// Classifies every test row with the network; only correctly classified
// seeds may enter preservation queries.
std::vector<SeedInput> make_seed_inputs(const Network& net, const Dataset& test_normalized);

} // namespace nodebias
