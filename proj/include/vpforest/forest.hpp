#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vpforest/instrument.hpp"
#include "vpforest/rng.hpp"
#include "vpforest/stream.hpp"

namespace vpforest {

/// One tree node. Leaves have split_dim == -1 and carry label counts;
/// internal nodes carry the cut (dimension, threshold, time). `lower` and
/// `upper` bound the block of samples routed through the node.
struct MondrianNode {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::uint32_t> counts;
    double split_time = 0.0;
    double split_threshold = 0.0;
    int split_dim = -1;
    int parent = -1;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return split_dim < 0; }
};

/// Fixed-capacity arena shared by all trees of one forest. Every node is
/// constructed up front; allocation just hands out the next index. Once
/// exhausted, the forest stops growing structurally but keeps updating
/// bounds and counts.
class NodePool {
public:
    NodePool(std::size_t capacity_bytes, std::size_t node_size_bytes, int n_features,
             int n_classes);

    bool can_allocate(std::size_t n) const { return allocated_ + n <= nodes_.size(); }
    int allocate();  // resets and returns the next node index; pool must not be full

    MondrianNode& operator[](int i) { return nodes_[static_cast<std::size_t>(i)]; }
    const MondrianNode& operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }

    std::size_t capacity_nodes() const { return nodes_.size(); }
    std::size_t capacity_bytes() const { return capacity_bytes_; }
    std::size_t node_size_bytes() const { return node_size_bytes_; }
    std::size_t allocated() const { return allocated_; }
    std::size_t allocated_bytes() const { return allocated_ * node_size_bytes_; }

private:
    std::size_t capacity_bytes_;
    std::size_t node_size_bytes_;
    std::vector<MondrianNode> nodes_;
    std::size_t allocated_ = 0;
};

struct ForestConfig {
    int n_trees = 5;
    std::size_t memory_bytes = 600000;
    double base_count = 0.0;  // root pseudo-count per class
    double discount = 1.0;    // absolute discount toward the parent posterior
    double budget = 0.4;      // lifetime cap on split times
    int n_features = 12;
    int n_classes = 2;
    std::uint64_t seed = 0;
    PrecisionFormat fmt{};
    InstrumentationMode mode = InstrumentationMode::Uninstrumented;
};

/// Reference hyperparameters keyed by forest size: (base_count, discount,
/// budget) = (0, 1, 1.0) for 1 tree, (0, 1, 0.4) for 5 or 10, (0, 1, 0.2)
/// for 50 and anything larger.
void apply_default_hyperparams(ForestConfig& config);

/// The memory model for one node: int_bytes covers counts and indices,
/// float_bytes the bound arrays, sized equal by construction, with float
/// storage scaled by the emulated width over 64.
struct Footprint {
    std::size_t int_bytes = 0;
    std::size_t float_bytes = 0;
    std::size_t total = 0;
};

/// Per-node model footprint under the config's mode and format.
Footprint node_footprint(const ForestConfig& config);

/// Per-dimension amounts by which `x` sticks out of the node's block, and
/// their sum (the extension mass driving the split clock). Zero everywhere
/// when the block already contains x.
double extension_mass(const MondrianNode& node, const std::vector<double>& x,
                      const Instrument& instr, std::vector<double>& ext);

struct SplitDraw {
    int dim = -1;
    double threshold = 0.0;
    double time = 0.0;
};

/// Draws a candidate split for extending `node` with `x`: the dimension with
/// probability proportional to its extension amount, the threshold uniform
/// in the extension interval on that dimension, and the split time as
/// parent_time plus an exponential waiting time with rate `eta`.
/// Pre: eta > 0 (eta and ext from extension_mass).
SplitDraw sample_split(const MondrianNode& node, const std::vector<double>& x,
                       double parent_time, const std::vector<double>& ext, double eta, Rng& rng,
                       const Instrument& instr);

class MondrianForest {
public:
    explicit MondrianForest(const ForestConfig& config);

    /// Test-then-train building block: routes the sample down every tree,
    /// possibly inserting one split per tree, and updates leaf counts.
    void partial_fit(const StreamSample& sample);

    /// Mean over trees of the smoothed per-tree posterior; sums to 1 at
    /// working precision.
    std::vector<double> predict_proba(const std::vector<double>& features) const;

    /// Argmax of predict_proba, ties toward the smallest class index.
    int predict(const std::vector<double>& features) const;

    /// Current model footprint: allocated nodes times the per-node model.
    Footprint footprint() const;

    const ForestConfig& config() const { return config_; }
    const NodePool& pool() const { return pool_; }
    const Instrument& instrument() const { return instrument_; }
    const std::vector<int>& roots() const { return roots_; }

private:
    int grow_leaf(const std::vector<double>& x, int label, int parent);
    void extend_tree(int tree, const std::vector<double>& x, int label);
    void insert_split_above(int tree, int node, const SplitDraw& draw,
                            const std::vector<double>& x, int label);
    std::vector<double> tree_posterior(int root, const std::vector<double>& x) const;
    std::vector<double> node_posterior(const MondrianNode& node, const std::vector<double>& q,
                                       bool is_root) const;

    ForestConfig config_;
    Instrument instrument_;
    NodePool pool_;
    std::vector<int> roots_;
    std::vector<Rng> tree_rngs_;
    // Hyperparameters after instrumentation (rounded once under Whole).
    double base_count_ = 0.0;
    double discount_ = 1.0;
    double budget_ = 0.4;
};

}  // namespace vpforest
