#include "vpforest/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vpforest {

NodePool::NodePool(std::size_t capacity_bytes, std::size_t node_size_bytes, int n_features,
                   int n_classes)
    : capacity_bytes_(capacity_bytes), node_size_bytes_(node_size_bytes) {
    const std::size_t capacity_nodes = capacity_bytes / node_size_bytes;
    nodes_.resize(capacity_nodes);
    for (auto& node : nodes_) {
        node.lower.assign(static_cast<std::size_t>(n_features), 0.0);
        node.upper.assign(static_cast<std::size_t>(n_features), 0.0);
        node.counts.assign(static_cast<std::size_t>(n_classes), 0);
    }
}

int NodePool::allocate() {
    MondrianNode& node = nodes_[allocated_];
    std::fill(node.lower.begin(), node.lower.end(), 0.0);
    std::fill(node.upper.begin(), node.upper.end(), 0.0);
    std::fill(node.counts.begin(), node.counts.end(), 0u);
    node.split_time = 0.0;
    node.split_threshold = 0.0;
    node.split_dim = -1;
    node.parent = node.left = node.right = -1;
    return static_cast<int>(allocated_++);
}

void apply_default_hyperparams(ForestConfig& config) {
    config.base_count = 0.0;
    config.discount = 1.0;
    if (config.n_trees <= 1) {
        config.budget = 1.0;
    } else if (config.n_trees <= 10) {
        config.budget = 0.4;
    } else {
        config.budget = 0.2;
    }
}

Footprint node_footprint(const ForestConfig& config) {
    // Bounds dominate the node: 2 arrays of n_features values, 8 bytes each
    // at full width. Integer storage (counts, indices) is modelled at the
    // same size, so the baseline splits 50/50 between int and float bytes.
    const std::size_t base = 16 * static_cast<std::size_t>(config.n_features);
    const int width = config.mode == InstrumentationMode::Uninstrumented ? 64
                                                                         : config.fmt.width();
    Footprint fp;
    fp.int_bytes = base;
    fp.float_bytes = (base * static_cast<std::size_t>(width) + 63) / 64;
    fp.total = fp.int_bytes + fp.float_bytes;
    return fp;
}

double extension_mass(const MondrianNode& node, const std::vector<double>& x,
                      const Instrument& instr, std::vector<double>& ext) {
    ext.assign(x.size(), 0.0);
    double eta = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (x[d] > node.upper[d]) {
            ext[d] = instr.op(ArithOp::Sub, x[d], node.upper[d]);
        } else if (x[d] < node.lower[d]) {
            ext[d] = instr.op(ArithOp::Sub, node.lower[d], x[d]);
        }
        if (ext[d] > 0.0) {
            eta = instr.op(ArithOp::Add, eta, ext[d]);
        }
    }
    return eta;
}

SplitDraw sample_split(const MondrianNode& node, const std::vector<double>& x,
                       double parent_time, const std::vector<double>& ext, double eta, Rng& rng,
                       const Instrument& instr) {
    SplitDraw draw;

    // Waiting time first: rate from the (possibly rounded) mass, the variate
    // itself at working precision, one rounding on the consumed sum.
    const double waiting = rng.exponential(eta);
    draw.time = instr.op(ArithOp::Add, parent_time, waiting);

    // Dimension with probability ext[d] / eta. Replaying the same additions
    // used to accumulate eta keeps the final cumulative sum equal to eta
    // even under rounding, so the fallback only covers target == eta.
    const double u = instr.value(rng.uniform01());
    const double target = instr.op(ArithOp::Mul, u, eta);
    double cum = 0.0;
    draw.dim = -1;
    for (std::size_t d = 0; d < ext.size(); ++d) {
        if (ext[d] <= 0.0) continue;
        draw.dim = static_cast<int>(d);
        cum = instr.op(ArithOp::Add, cum, ext[d]);
        if (cum > target) break;
    }

    // Threshold uniform in the gap between the old bound and the new value.
    const bool upper_side = x[static_cast<std::size_t>(draw.dim)] >
                            node.upper[static_cast<std::size_t>(draw.dim)];
    const double lo = upper_side ? node.upper[static_cast<std::size_t>(draw.dim)]
                                 : x[static_cast<std::size_t>(draw.dim)];
    const double hi = upper_side ? x[static_cast<std::size_t>(draw.dim)]
                                 : node.lower[static_cast<std::size_t>(draw.dim)];
    const double v = instr.value(rng.uniform01());
    const double span = instr.op(ArithOp::Sub, hi, lo);
    draw.threshold = instr.op(ArithOp::Add, lo, instr.op(ArithOp::Mul, span, v));
    return draw;
}

namespace {

const ForestConfig& validate_config(const ForestConfig& config) {
    if (config.n_trees < 1) throw Error("n_trees must be at least 1");
    if (config.n_features < 1) throw Error("n_features must be at least 1");
    if (config.n_classes < 1) throw Error("n_classes must be at least 1");
    if (!(config.discount >= 0.0 && config.discount <= 1.0)) {
        throw Error("discount must lie in [0, 1]");
    }
    if (!(config.budget > 0.0)) throw Error("budget must be positive");
    if (!(config.base_count >= 0.0)) throw Error("base_count must be non-negative");
    return config;
}

}  // namespace

MondrianForest::MondrianForest(const ForestConfig& config)
    : config_(validate_config(config)),
      instrument_(config.mode, config.fmt),
      pool_(config.memory_bytes, node_footprint(config).total, config.n_features,
            config.n_classes),
      roots_(static_cast<std::size_t>(config.n_trees), -1) {
    base_count_ = instrument_.value(config.base_count);
    discount_ = instrument_.value(config.discount);
    budget_ = instrument_.value(config.budget);
    tree_rngs_.reserve(static_cast<std::size_t>(config.n_trees));
    for (int t = 0; t < config.n_trees; ++t) {
        tree_rngs_.emplace_back(mix_seed({config.seed, static_cast<std::uint64_t>(t)}));
    }
}

int MondrianForest::grow_leaf(const std::vector<double>& x, int label, int parent) {
    const int i = pool_.allocate();
    MondrianNode& leaf = pool_[i];
    leaf.parent = parent;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double stored = instrument_.bound(x[d]);
        leaf.lower[d] = stored;
        leaf.upper[d] = stored;
    }
    ++leaf.counts[static_cast<std::size_t>(label)];
    return i;
}

void MondrianForest::insert_split_above(int tree, int node_id, const SplitDraw& draw,
                                        const std::vector<double>& x, int label) {
    const bool sample_right = x[static_cast<std::size_t>(draw.dim)] >
                              pool_[node_id].upper[static_cast<std::size_t>(draw.dim)];
    const int parent_id = pool_.allocate();
    const int sibling_id = grow_leaf(x, label, parent_id);

    MondrianNode& parent = pool_[parent_id];
    MondrianNode& node = pool_[node_id];
    parent.split_dim = draw.dim;
    parent.split_time = draw.time;
    for (std::size_t d = 0; d < x.size(); ++d) {
        parent.lower[d] = instrument_.bound(std::min(node.lower[d], x[d]));
        parent.upper[d] = instrument_.bound(std::max(node.upper[d], x[d]));
    }
    // Bound storage may round past the full-precision cut; clamping keeps
    // the cut inside the box it partitions.
    parent.split_threshold =
        std::clamp(draw.threshold, parent.lower[static_cast<std::size_t>(draw.dim)],
                   parent.upper[static_cast<std::size_t>(draw.dim)]);

    parent.parent = node.parent;
    if (node.parent < 0) {
        roots_[static_cast<std::size_t>(tree)] = parent_id;
    } else if (pool_[node.parent].left == node_id) {
        pool_[node.parent].left = parent_id;
    } else {
        pool_[node.parent].right = parent_id;
    }
    node.parent = parent_id;
    parent.left = sample_right ? node_id : sibling_id;
    parent.right = sample_right ? sibling_id : node_id;
}

void MondrianForest::extend_tree(int tree, const std::vector<double>& x, int label) {
    if (roots_[static_cast<std::size_t>(tree)] < 0) {
        if (pool_.can_allocate(1)) {
            roots_[static_cast<std::size_t>(tree)] = grow_leaf(x, label, -1);
        }
        return;
    }
    Rng& rng = tree_rngs_[static_cast<std::size_t>(tree)];
    std::vector<double> ext;
    int j = roots_[static_cast<std::size_t>(tree)];
    double parent_time = 0.0;
    while (true) {
        MondrianNode& node = pool_[j];
        const double eta = extension_mass(node, x, instrument_, ext);
        const double cap = std::min(
            node.is_leaf() ? std::numeric_limits<double>::infinity() : node.split_time,
            budget_);
        if (eta > 0.0 && pool_.can_allocate(2)) {
            const SplitDraw draw = sample_split(node, x, parent_time, ext, eta, rng,
                                                instrument_);
            if (draw.time < cap) {
                insert_split_above(tree, j, draw, x, label);
                return;  // the new sibling leaf absorbed the sample
            }
        }
        // No split: the block absorbs the sample.
        for (std::size_t d = 0; d < x.size(); ++d) {
            if (x[d] < node.lower[d]) node.lower[d] = instrument_.bound(x[d]);
            if (x[d] > node.upper[d]) node.upper[d] = instrument_.bound(x[d]);
        }
        if (node.is_leaf()) {
            ++node.counts[static_cast<std::size_t>(label)];
            return;
        }
        parent_time = node.split_time;
        j = x[static_cast<std::size_t>(node.split_dim)] <= node.split_threshold ? node.left
                                                                                : node.right;
    }
}

void MondrianForest::partial_fit(const StreamSample& sample) {
    if (sample.features.size() != static_cast<std::size_t>(config_.n_features)) {
        throw DimensionMismatchError("sample has " + std::to_string(sample.features.size()) +
                                     " features, forest expects " +
                                     std::to_string(config_.n_features));
    }
    if (sample.label < 0 || sample.label >= config_.n_classes) {
        throw DimensionMismatchError("label " + std::to_string(sample.label) +
                                     " outside the configured " +
                                     std::to_string(config_.n_classes) + " classes");
    }
    std::vector<double> x = sample.features;
    for (double& v : x) {
        if (!std::isfinite(v)) {
            throw NonFiniteFeatureError("input feature is non-finite");
        }
        v = instrument_.value(v);
    }
    for (int t = 0; t < config_.n_trees; ++t) {
        extend_tree(t, x, sample.label);
    }
}

std::vector<double> MondrianForest::node_posterior(const MondrianNode& node,
                                                   const std::vector<double>& q,
                                                   bool is_root) const {
    const double pseudo = is_root ? base_count_ : 0.0;
    std::uint64_t n_observed = 0;
    for (std::uint32_t c : node.counts) {
        n_observed += c;
    }
    // Counts are integers and stay exact; only the arithmetic combining
    // them with the smoothing terms is instrumented.
    const double n_eff =
        pseudo > 0.0
            ? instrument_.op(ArithOp::Add, static_cast<double>(n_observed),
                             instrument_.op(ArithOp::Mul,
                                            static_cast<double>(config_.n_classes), pseudo))
            : static_cast<double>(n_observed);
    if (n_eff <= 0.0) {
        return q;  // nothing observed here: inherit the parent posterior
    }

    int present = 0;
    for (std::uint32_t c : node.counts) {
        if (static_cast<double>(c) + pseudo > 0.0) ++present;
    }
    const double discount_mass =
        instrument_.op(ArithOp::Mul, discount_, static_cast<double>(present));

    std::vector<double> p(q.size(), 0.0);
    for (std::size_t k = 0; k < q.size(); ++k) {
        const double count_k =
            pseudo > 0.0
                ? instrument_.op(ArithOp::Add, static_cast<double>(node.counts[k]), pseudo)
                : static_cast<double>(node.counts[k]);
        double numerator = count_k;
        if (count_k > 0.0) {
            numerator = instrument_.op(ArithOp::Sub, count_k, discount_);
        }
        numerator = instrument_.op(ArithOp::Add, numerator,
                                   instrument_.op(ArithOp::Mul, discount_mass, q[k]));
        p[k] = instrument_.op(ArithOp::Div, numerator, n_eff);
    }
    return p;
}

std::vector<double> MondrianForest::tree_posterior(int root,
                                                   const std::vector<double>& x) const {
    // Root prior: uniform over classes, optionally thickened by base_count.
    const double uniform =
        instrument_.op(ArithOp::Div, 1.0, static_cast<double>(config_.n_classes));
    std::vector<double> q(static_cast<std::size_t>(config_.n_classes), uniform);
    if (root < 0) {
        return q;
    }
    int j = root;
    bool is_root = true;
    while (true) {
        const MondrianNode& node = pool_[j];
        q = node_posterior(node, q, is_root);
        is_root = false;
        if (node.is_leaf()) {
            return q;
        }
        j = x[static_cast<std::size_t>(node.split_dim)] <= node.split_threshold ? node.left
                                                                                : node.right;
    }
}

std::vector<double> MondrianForest::predict_proba(const std::vector<double>& features) const {
    if (features.size() != static_cast<std::size_t>(config_.n_features)) {
        throw DimensionMismatchError("query has " + std::to_string(features.size()) +
                                     " features, forest expects " +
                                     std::to_string(config_.n_features));
    }
    std::vector<double> x = features;
    for (double& v : x) {
        if (!std::isfinite(v)) {
            throw NonFiniteFeatureError("query feature is non-finite");
        }
        v = instrument_.value(v);
    }
    std::vector<double> acc(static_cast<std::size_t>(config_.n_classes), 0.0);
    for (int t = 0; t < config_.n_trees; ++t) {
        const std::vector<double> post = tree_posterior(roots_[static_cast<std::size_t>(t)], x);
        for (std::size_t k = 0; k < acc.size(); ++k) {
            acc[k] = instrument_.op(ArithOp::Add, acc[k], post[k]);
        }
    }
    for (double& v : acc) {
        v = instrument_.op(ArithOp::Div, v, static_cast<double>(config_.n_trees));
    }
    return acc;
}

int MondrianForest::predict(const std::vector<double>& features) const {
    const std::vector<double> proba = predict_proba(features);
    std::size_t best = 0;
    for (std::size_t k = 1; k < proba.size(); ++k) {
        if (proba[k] > proba[best]) {
            best = k;
        }
    }
    return static_cast<int>(best);
}

Footprint MondrianForest::footprint() const {
    Footprint per_node = node_footprint(config_);
    Footprint fp;
    fp.int_bytes = per_node.int_bytes * pool_.allocated();
    fp.float_bytes = per_node.float_bytes * pool_.allocated();
    fp.total = per_node.total * pool_.allocated();
    return fp;
}

}  // namespace vpforest
