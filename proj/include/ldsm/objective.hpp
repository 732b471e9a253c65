/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldsm/sparse.hpp"

namespace ldsm {

inline constexpr int kMaxArity = 8;

struct ObjectiveParams {
    int arity = 2;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};

/// Throws std::invalid_argument for arity outside [2, kMaxArity] or a negative
/// lambda. Returns human-readable warnings, e.g. when lambda2 is too small for
/// the perfectly balanced and pure split to be the unique minimum
/// (arity - 3 >= lambda2 / lambda1).
std::vector<std::string> check_objective_params(const ObjectiveParams& params);

/// Thrown when an objective is requested for a node that has seen no labels.
class EmptyNodeError : public std::domain_error {
public:
    EmptyNodeError() : std::domain_error("node has no label mass (c_v == 0)") {}
};

/// Running per-node state of the splitting objective.
///
///   label_mass()        C_v, total label occurrences seen by the node
///   label_count(i)      l_v[i], occurrences of label i
///   marginals()[j]      P_j, probability of being sent to child j
///   conditionals(i)[j]  P_j^i, the same conditioned on label i
///
/// pi(i) = l_v[i] / C_v. Labels are stored in first-seen order, which keeps
/// every iteration over them deterministic.
class NodeStats {
public:
    explicit NodeStats(int arity);

    int arity() const noexcept { return arity_; }
    double label_mass() const noexcept { return label_mass_; }
    std::span<const double> marginals() const noexcept { return marginals_; }

    std::size_t num_labels() const noexcept { return label_ids_.size(); }
    std::span<const LabelId> labels() const noexcept { return label_ids_; }
    std::optional<std::size_t> slot(LabelId label) const;

    double count_at(std::size_t slot) const { return counts_[slot]; }
    std::span<const double> conditionals_at(std::size_t slot) const {
        return {conditionals_.data() + slot * static_cast<std::size_t>(arity_), static_cast<std::size_t>(arity_)};
    }
    double pi_at(std::size_t slot) const { return counts_[slot] / label_mass_; }

    double label_count(LabelId label) const;
    /// Zeros for an unseen label.
    std::vector<double> conditionals(LabelId label) const;
    double pi(LabelId label) const;

    /// C_v += |labels|, l_v[k] += 1 for each k. New labels start with all
    /// conditionals at 0.
    void observe(std::span<const LabelId> labels);

    /// Streaming probability update with one margin per child, after observe():
    ///   P_j   <- ((C_v - |y|) P_j + |y| margin_j) / C_v
    ///   P_j^k <- ((l_v[k] - 1) P_j^k + margin_j) / l_v[k]
    void record_margins(std::span<const LabelId> labels, std::span<const double> margins);

    // Direct assembly, used to build synthetic splits.
    void set_label_mass(double mass) noexcept { label_mass_ = mass; }
    void set_marginals(std::span<const double> marginals);
    void set_label(LabelId label, double count, std::span<const double> conditionals);

private:
    std::size_t ensure_slot(LabelId label);

    int arity_;
    double label_mass_ = 0.0;
    std::vector<double> marginals_;
    std::vector<LabelId> label_ids_;
    std::vector<double> counts_;
    std::vector<double> conditionals_; // slot-major, arity_ per slot
    std::unordered_map<LabelId, std::uint32_t> slots_;
};

/// The three parts of the objective, without the lambda weights.
struct ObjectiveTerms {
    double balance = 0.0;         // sum_{j<l} |P_j - P_l|
    double class_integrity = 0.0; // sum_i pi_i sum_{j<l} |P_j^i - P_l^i|
    double multiway = 0.0;        // |sum_j P_j - 1|

    double value(double lambda1, double lambda2) const noexcept {
        return balance - lambda1 * class_integrity + lambda2 * multiway;
    }
    /// -lambda1 * CI + lambda2 * MWP
    double purity_part(double lambda1, double lambda2) const noexcept {
        return -lambda1 * class_integrity + lambda2 * multiway;
    }
};

/// Throws EmptyNodeError when label_mass() == 0.
ObjectiveTerms objective_terms(const NodeStats& stats);

/// J = B - lambda1 * CI + lambda2 * MWP over every label at the node.
double compute_objective(const NodeStats& stats, const ObjectiveParams& params);

/// Nonzero bit pattern over children; bit j set means "send to child j".
class DirectionMask {
public:
    explicit DirectionMask(std::uint32_t bits) : bits_(bits) {
        if (bits == 0) throw std::invalid_argument("direction mask must be nonzero");
    }
    static DirectionMask single(int child) { return DirectionMask(1u << child); }

    std::uint32_t bits() const noexcept { return bits_; }
    bool contains(int child) const noexcept { return (bits_ >> child) & 1u; }
    int count() const noexcept { return __builtin_popcount(bits_); }

    friend bool operator==(DirectionMask, DirectionMask) = default;

private:
    std::uint32_t bits_;
};

/// Searches all 2^m - 1 direction subsets for the one minimising J after a
/// hypothetical update with this example sent along the subset. Only the
/// example's labels enter the class-integrity sum; the remaining labels add
/// the same constant to every candidate. Ties go to the smallest mask.
///
/// `stats` must already include the example (observe() called). Throws
/// std::invalid_argument for an empty label set.
DirectionMask best_direction_subset(const NodeStats& stats, std::span<const LabelId> labels,
                                    const ObjectiveParams& params);

/// max_j |P_j - mean(P)|, in [0, 1 - 1/m]. Zero means perfectly balanced.
double balancedness(const NodeStats& stats);

/// (1/m) sum_j sum_i pi_i min(P_j^i, sum_l P_l^i - P_j^i), in [0, 1]. Zero
/// means perfectly pure.
double purity(const NodeStats& stats);

} // namespace ldsm
