/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldsm/objective.hpp"
#include "ldsm/random.hpp"
#include "ldsm/regressor.hpp"
#include "ldsm/sparse.hpp"

namespace ldsm {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeParams {
    int arity = 2;                      // M
    std::size_t max_nodes = 1023;       // T_max
    int epochs = 5;                     // E
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    OptimizerConfig optimizer;
    std::uint64_t seed = 1;
    std::size_t min_split_examples = 2; // smaller children stay leaves
    std::size_t top_r = 5;              // default prediction length

    ObjectiveParams objective() const { return {arity, lambda1, lambda2}; }
};

/// Throws std::invalid_argument for unusable values; returns warnings for
/// values outside the usual hyper-parameter grid.
std::vector<std::string> check_tree_params(const TreeParams& params);

struct LabelCount {
    LabelId label;
    std::uint32_t count;

    friend bool operator==(const LabelCount&, const LabelCount&) = default;
};

/// Sparse label histogram sorted by label id.
using LabelHistogram = std::vector<LabelCount>;

/// Builds a sorted histogram from the labels of the given examples.
LabelHistogram make_histogram(const Dataset& data, std::span<const std::uint32_t> example_ids);
std::uint64_t histogram_mass(const LabelHistogram& hist) noexcept;

/// Sum of bins minus the largest bin; 0 for an empty histogram.
double node_priority(const LabelHistogram& hist) noexcept;

/// Statistics recorded when a node finishes training.
struct NodeSummary {
    double objective = 0.0;
    double balancedness = 0.0;
    double purity = 0.0;
    double label_mass = 0.0;
};

struct TreeNode {
    NodeId id = 0;
    NodeId parent = kNoNode;
    std::uint32_t depth = 0;
    std::uint32_t num_examples = 0;  // training examples routed here
    std::vector<NodeId> children;    // empty for leaves, otherwise one per direction
    LabelHistogram histogram;

    // Trained split, internal nodes only. Regressors live in a compact
    // feature space: local coordinate i is global feature features[i].
    std::vector<FeatureIndex> features;
    std::vector<LinearRegressor> regressors;
    NodeSummary summary;
    std::optional<NodeStats> stats; // kept after training, not serialised

    bool is_leaf() const noexcept { return children.empty(); }
};

struct ScoredLabel {
    LabelId label;
    double score;

    friend bool operator==(const ScoredLabel&, const ScoredLabel&) = default;
};

/// Accumulates (label, score) contributions and extracts the top entries.
class LabelScores {
public:
    void add(LabelId label, double score) { entries_.push_back({label, score}); }
    void add_histogram(const LabelHistogram& hist, double scale);
    bool empty() const noexcept { return entries_.empty(); }
    void clear() noexcept { entries_.clear(); }

    /// Merged scores, highest first; ties go to the smaller label id.
    std::vector<ScoredLabel> top(std::size_t r) const;

private:
    std::vector<ScoredLabel> entries_;
};

/// Per-direction margins sigmoid(w_j . x + b_j) of a trained node.
void node_margins(const TreeNode& node, const SparseVector& x, std::span<double> out);

/// Children whose margin exceeds 0.5, or the single highest-margin child
/// (smallest index on ties) when none does.
DirectionMask route_from_margins(std::span<const double> margins);
DirectionMask route_example(const TreeNode& node, const SparseVector& x);

class Tree {
public:
    Tree(TreeParams params, std::size_t num_features, std::size_t num_labels);

    /// Assembles a tree from stored nodes; throws FormatError when the node
    /// table is not a well-formed arity-M tree rooted at node 0.
    static Tree from_nodes(TreeParams params, std::size_t num_features, std::size_t num_labels,
                           std::vector<TreeNode> nodes);

    const TreeParams& params() const noexcept { return params_; }
    std::size_t num_features() const noexcept { return num_features_; }
    std::size_t num_labels() const noexcept { return num_labels_; }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::vector<TreeNode>& mutable_nodes() noexcept { return nodes_; }
    const TreeNode& node(NodeId id) const { return nodes_.at(id); }
    const TreeNode& root() const { return nodes_.front(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t internal_count() const noexcept;
    std::size_t leaf_count() const noexcept { return size() - internal_count(); }

    /// Largest number of edges from the root to a leaf.
    std::size_t depth() const noexcept;

    /// Leaves reached by x following every routed direction, in DFS order.
    std::vector<NodeId> reached_leaves(const SparseVector& x) const;

    /// Adds hist / mass for every non-empty reached leaf. If every reached
    /// leaf is empty, the deepest non-empty node met on the way down is used.
    void accumulate(const SparseVector& x, LabelScores& scores) const;

    std::vector<ScoredLabel> predict(const SparseVector& x, std::size_t r) const;

    NodeId add_node(TreeNode node);

private:
    TreeParams params_;
    std::size_t num_features_;
    std::size_t num_labels_;
    std::vector<TreeNode> nodes_;
};

inline std::vector<ScoredLabel> predict(const Tree& tree, const SparseVector& x, std::size_t r) {
    return tree.predict(x, r);
}
inline std::size_t tree_depth(const Tree& tree) noexcept { return tree.depth(); }

/// Examples routed to each child of a freshly trained node.
struct ChildAssignment {
    std::vector<std::vector<std::uint32_t>> members; // example ids per child
    std::vector<LabelHistogram> histograms;
};

/// Trains one node in place and routes its examples. Holds the scratch
/// buffers so that they are reused across nodes of a tree.
class NodeTrainer {
public:
    NodeTrainer(const Dataset& data, const TreeParams& params);

    /// Streams `epochs` times over the examples: observe labels, pick the
    /// direction subset minimising the objective, take one cross-entropy step
    /// per regressor, then fold the new margins into the node statistics.
    void train(TreeNode& node, std::span<const std::uint32_t> example_ids, Rng& rng);

    ChildAssignment assign_children(const TreeNode& node, std::span<const std::uint32_t> example_ids) const;

private:
    const Dataset& data_;
    const TreeParams& params_;
    std::vector<std::int32_t> local_of_; // global feature -> local coordinate, -1 if inactive
};

/// Called after each expansion with the partially built tree and the id of
/// the node that was just split.
using ExpansionObserver = std::function<void(const Tree&, NodeId)>;

/// Top-down construction: expand the frontier node with the highest
/// priority, train it, create its children, repeat until the queue is empty
/// or T_max is reached. Examples without labels are ignored. Throws
/// std::invalid_argument when no labelled example remains.
Tree build_tree(const Dataset& data, const TreeParams& params, const ExpansionObserver& observer = {});

} // namespace ldsm
