/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "ldsm/error.hpp"

namespace ldsm {

namespace {

bool on_grid(double lambda) {
    for (double g : {0.5, 1.0, 1.5, 2.0, 4.0})
        if (lambda == g) return true;
    return false;
}

} // namespace

std::vector<std::string> check_tree_params(const TreeParams& params) {
    auto warnings = check_objective_params(params.objective());
    if (params.max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");
    if (params.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (params.min_split_examples < 2) throw std::invalid_argument("min_split_examples must be >= 2");
    if (params.top_r < 1) throw std::invalid_argument("top_r must be >= 1");
    check_optimizer(params.optimizer);

    if (params.arity != 2 && params.arity != 4) warnings.push_back("arity outside the usual {2, 4}");
    if (!on_grid(params.lambda1) || !on_grid(params.lambda2))
        warnings.push_back("lambda outside the usual grid {0.5, 1, 1.5, 2, 4}");
    if (params.epochs > 20) warnings.push_back("more than 20 epochs per node");
    return warnings;
}

LabelHistogram make_histogram(const Dataset& data, std::span<const std::uint32_t> example_ids) {
    std::unordered_map<LabelId, std::uint32_t> counts;
    for (auto i : example_ids)
        for (LabelId k : data.examples[i].labels) ++counts[k];
    LabelHistogram hist;
    hist.reserve(counts.size());
    for (const auto& [label, count] : counts) hist.push_back({label, count});
    std::sort(hist.begin(), hist.end(), [](const LabelCount& a, const LabelCount& b) { return a.label < b.label; });
    return hist;
}

std::uint64_t histogram_mass(const LabelHistogram& hist) noexcept {
    std::uint64_t total = 0;
    for (const auto& b : hist) total += b.count;
    return total;
}

double node_priority(const LabelHistogram& hist) noexcept {
    std::uint64_t total = 0;
    std::uint32_t largest = 0;
    for (const auto& b : hist) {
        total += b.count;
        largest = std::max(largest, b.count);
    }
    return static_cast<double>(total - largest);
}

void LabelScores::add_histogram(const LabelHistogram& hist, double scale) {
    for (const auto& b : hist) entries_.push_back({b.label, scale * static_cast<double>(b.count)});
}

std::vector<ScoredLabel> LabelScores::top(std::size_t r) const {
    std::vector<ScoredLabel> merged(entries_);
    std::stable_sort(merged.begin(), merged.end(),
                     [](const ScoredLabel& a, const ScoredLabel& b) { return a.label < b.label; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (out > 0 && merged[out - 1].label == merged[i].label) {
            merged[out - 1].score += merged[i].score;
        } else {
            merged[out++] = merged[i];
        }
    }
    merged.resize(out);
    const auto better = [](const ScoredLabel& a, const ScoredLabel& b) {
        return a.score > b.score || (a.score == b.score && a.label < b.label);
    };
    const std::size_t keep = std::min(r, merged.size());
    std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(keep), merged.end(), better);
    merged.resize(keep);
    return merged;
}

void node_margins(const TreeNode& node, const SparseVector& x, std::span<double> out) {
    const std::size_t m = node.regressors.size();
    const std::size_t bias = node.features.size();
    for (std::size_t j = 0; j < m; ++j) out[j] = node.regressors[j].weights()[bias];

    auto it = node.features.begin();
    const auto end = node.features.end();
    for (const auto& e : x) {
        it = std::lower_bound(it, end, e.index);
        if (it == end) break;
        if (*it != e.index) continue;
        const auto local = static_cast<std::size_t>(it - node.features.begin());
        for (std::size_t j = 0; j < m; ++j) out[j] += e.value * node.regressors[j].weights()[local];
    }
    for (std::size_t j = 0; j < m; ++j) out[j] = sigmoid(out[j]);
}

DirectionMask route_from_margins(std::span<const double> margins) {
    std::uint32_t bits = 0;
    std::size_t best = 0;
    for (std::size_t j = 0; j < margins.size(); ++j) {
        if (margins[j] > 0.5) bits |= 1u << j;
        if (margins[j] > margins[best]) best = j;
    }
    if (bits == 0) bits = 1u << best;
    return DirectionMask(bits);
}

DirectionMask route_example(const TreeNode& node, const SparseVector& x) {
    std::array<double, kMaxArity> margins{};
    const std::size_t m = node.regressors.size();
    node_margins(node, x, std::span<double>(margins.data(), m));
    return route_from_margins(std::span<const double>(margins.data(), m));
}

Tree::Tree(TreeParams params, std::size_t num_features, std::size_t num_labels)
    : params_(params), num_features_(num_features), num_labels_(num_labels) {}

Tree Tree::from_nodes(TreeParams params, std::size_t num_features, std::size_t num_labels,
                      std::vector<TreeNode> nodes) {
    if (nodes.empty()) throw FormatError("tree has no nodes");
    const auto m = static_cast<std::size_t>(params.arity);
    std::vector<int> parents(nodes.size(), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.id != i) throw FormatError("node ids must be dense and ordered");
        if (n.is_leaf()) {
            if (!n.regressors.empty()) throw FormatError("leaf node carries regressors");
            continue;
        }
        if (n.children.size() != m || n.regressors.size() != m)
            throw FormatError("internal node " + std::to_string(i) + " must have " + std::to_string(m) +
                              " children and regressors");
        for (const auto& reg : n.regressors)
            if (reg.dim() != n.features.size()) throw FormatError("regressor width does not match feature set");
        if (!std::is_sorted(n.features.begin(), n.features.end()) ||
            std::adjacent_find(n.features.begin(), n.features.end()) != n.features.end())
            throw FormatError("node feature set must be strictly increasing");
        for (NodeId c : n.children) {
            if (c == 0 || c >= nodes.size()) throw FormatError("child id out of range");
            if (nodes[c].parent != n.id || nodes[c].depth != n.depth + 1)
                throw FormatError("child " + std::to_string(c) + " disagrees with its parent link");
            ++parents[c];
        }
    }
    if (nodes[0].parent != kNoNode || nodes[0].depth != 0) throw FormatError("node 0 must be the root");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (parents[i] != 1) throw FormatError("node " + std::to_string(i) + " must have exactly one parent");

    Tree tree(params, num_features, num_labels);
    tree.nodes_ = std::move(nodes);
    return tree;
}

std::size_t Tree::internal_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

std::size_t Tree::depth() const noexcept {
    std::size_t d = 0;
    for (const auto& n : nodes_) d = std::max<std::size_t>(d, n.depth);
    return d;
}

NodeId Tree::add_node(TreeNode node) {
    node.id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(std::move(node));
    return nodes_.back().id;
}

std::vector<NodeId> Tree::reached_leaves(const SparseVector& x) const {
    std::vector<NodeId> leaves;
    std::vector<NodeId> stack{0};
    while (!stack.empty()) {
        const TreeNode& n = nodes_[stack.back()];
        stack.pop_back();
        if (n.is_leaf()) {
            leaves.push_back(n.id);
            continue;
        }
        const auto mask = route_example(n, x);
        // Push in reverse so children are visited in index order.
        for (std::size_t j = n.children.size(); j-- > 0;)
            if (mask.contains(static_cast<int>(j))) stack.push_back(n.children[j]);
    }
    return leaves;
}

void Tree::accumulate(const SparseVector& x, LabelScores& scores) const {
    struct Frame {
        NodeId node;
        NodeId fallback; // deepest non-empty node on the path so far
    };
    std::vector<Frame> stack{{0, kNoNode}};
    bool any = false;
    NodeId deepest_fallback = kNoNode;

    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const TreeNode& n = nodes_[f.node];
        const NodeId fallback = n.histogram.empty() ? f.fallback : n.id;
        if (n.is_leaf()) {
            if (!n.histogram.empty()) {
                scores.add_histogram(n.histogram, 1.0 / static_cast<double>(histogram_mass(n.histogram)));
                any = true;
            } else if (fallback != kNoNode &&
                       (deepest_fallback == kNoNode || nodes_[fallback].depth > nodes_[deepest_fallback].depth)) {
                deepest_fallback = fallback;
            }
            continue;
        }
        const auto mask = route_example(n, x);
        for (std::size_t j = n.children.size(); j-- > 0;)
            if (mask.contains(static_cast<int>(j))) stack.push_back({n.children[j], fallback});
    }
    if (!any && deepest_fallback != kNoNode) {
        const auto& h = nodes_[deepest_fallback].histogram;
        scores.add_histogram(h, 1.0 / static_cast<double>(histogram_mass(h)));
    }
}

std::vector<ScoredLabel> Tree::predict(const SparseVector& x, std::size_t r) const {
    LabelScores scores;
    accumulate(x, scores);
    return scores.top(r);
}

NodeTrainer::NodeTrainer(const Dataset& data, const TreeParams& params)
    : data_(data), params_(params), local_of_(data.num_features, -1) {}

void NodeTrainer::train(TreeNode& node, std::span<const std::uint32_t> example_ids, Rng& rng) {
    const auto m = static_cast<std::size_t>(params_.arity);
    const auto objective = params_.objective();

    // Compact feature space: every feature present in the node's examples.
    std::vector<FeatureIndex> features;
    for (auto i : example_ids) {
        for (const auto& e : data_.examples[i].features) {
            if (local_of_[e.index] < 0) {
                local_of_[e.index] = 0;
                features.push_back(e.index);
            }
        }
    }
    std::sort(features.begin(), features.end());
    for (std::size_t f = 0; f < features.size(); ++f) local_of_[features[f]] = static_cast<std::int32_t>(f);

    std::vector<LinearRegressor> regs;
    regs.reserve(m);
    for (std::size_t j = 0; j < m; ++j) regs.push_back(LinearRegressor::random(features.size(), rng));

    NodeStats stats(params_.arity);
    SparseVector local;
    std::array<double, kMaxArity> margins{};
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        for (auto i : example_ids) {
            const Example& ex = data_.examples[i];
            if (ex.labels.empty()) continue;
            local.clear();
            for (const auto& e : ex.features)
                local.append(static_cast<FeatureIndex>(local_of_[e.index]), e.value);

            stats.observe(ex.labels);
            const DirectionMask mask = best_direction_subset(stats, ex.labels, objective);
            for (std::size_t j = 0; j < m; ++j) {
                regs[j].train_step(local, mask.contains(static_cast<int>(j)) ? 1 : 0, params_.optimizer);
                margins[j] = regs[j].margin(local);
            }
            stats.record_margins(ex.labels, std::span<const double>(margins.data(), m));
        }
    }
    for (auto& r : regs) r.settle();
    for (FeatureIndex f : features) local_of_[f] = -1;

    node.features = std::move(features);
    node.regressors = std::move(regs);
    if (stats.label_mass() > 0.0) {
        node.summary.objective = compute_objective(stats, objective);
        node.summary.balancedness = balancedness(stats);
        node.summary.purity = purity(stats);
        node.summary.label_mass = stats.label_mass();
    }
    node.stats = std::move(stats);
}

ChildAssignment NodeTrainer::assign_children(const TreeNode& node, std::span<const std::uint32_t> example_ids) const {
    const auto m = static_cast<std::size_t>(params_.arity);
    ChildAssignment out;
    out.members.resize(m);
    for (auto i : example_ids) {
        const auto mask = route_example(node, data_.examples[i].features);
        for (std::size_t j = 0; j < m; ++j)
            if (mask.contains(static_cast<int>(j))) out.members[j].push_back(i);
    }
    out.histograms.reserve(m);
    for (const auto& ids : out.members) out.histograms.push_back(make_histogram(data_, ids));
    return out;
}

Tree build_tree(const Dataset& data, const TreeParams& params, const ExpansionObserver& observer) {
    check_tree_params(params);

    std::vector<std::uint32_t> root_ids;
    root_ids.reserve(data.size());
    for (std::uint32_t i = 0; i < data.size(); ++i)
        if (!data.examples[i].labels.empty()) root_ids.push_back(i);
    if (root_ids.empty()) throw std::invalid_argument("dataset has no labelled examples");

    Tree tree(params, data.num_features, data.num_labels);
    {
        TreeNode root;
        root.histogram = make_histogram(data, root_ids);
        root.num_examples = static_cast<std::uint32_t>(root_ids.size());
        tree.add_node(std::move(root));
    }

    // Example lists exist only for frontier nodes still waiting in the queue.
    std::unordered_map<NodeId, std::vector<std::uint32_t>> members;
    members.emplace(0, std::move(root_ids));

    struct Entry {
        double priority;
        std::uint64_t seq;
        NodeId node;
    };
    const auto lower = [](const Entry& a, const Entry& b) {
        return a.priority < b.priority || (a.priority == b.priority && a.seq > b.seq);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> queue(lower);
    std::uint64_t seq = 0;
    // The root is always expanded first, whatever its histogram.
    queue.push({std::numeric_limits<double>::infinity(), seq++, 0});

    Rng rng(params.seed);
    NodeTrainer trainer(data, params);
    const auto m = static_cast<std::size_t>(params.arity);
    std::size_t t = 1;

    while (!queue.empty() && t < params.max_nodes) {
        const NodeId v = queue.top().node;
        queue.pop();
        auto ids = std::move(members.at(v));
        members.erase(v);

        trainer.train(tree.mutable_nodes()[v], ids, rng);
        auto children = trainer.assign_children(tree.node(v), ids);
        ids.clear();
        ids.shrink_to_fit();

        std::vector<NodeId> child_ids;
        for (std::size_t j = 0; j < m; ++j) {
            TreeNode child;
            child.parent = v;
            child.depth = tree.node(v).depth + 1;
            child.num_examples = static_cast<std::uint32_t>(children.members[j].size());
            child.histogram = std::move(children.histograms[j]);
            child_ids.push_back(tree.add_node(std::move(child)));
        }
        tree.mutable_nodes()[v].children = child_ids;

        for (std::size_t j = 0; j < m; ++j) {
            const NodeId c = child_ids[j];
            const double priority = node_priority(tree.node(c).histogram);
            if (priority > 0.0 && children.members[j].size() >= params.min_split_examples) {
                members.emplace(c, std::move(children.members[j]));
                queue.push({priority, seq++, c});
            }
        }
        t += m;
        if (observer) observer(tree, v);
    }
    return tree;
}

} // namespace ldsm
