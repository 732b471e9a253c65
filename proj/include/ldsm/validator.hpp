/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ldsm/objective.hpp"
#include "ldsm/random.hpp"
#include "ldsm/tree.hpp"

namespace ldsm {

/// Outcome of one runnable check. Non-gating checks are diagnostics: they
/// are reported but do not affect ValidationReport::passed().
struct CheckResult {
    std::string name;
    bool passed = true;
    bool gating = true;
    std::size_t samples = 0;    // instances that were checked
    std::size_t violations = 0;
    std::size_t skipped = 0;    // instances failing the check's precondition
    double min_value = 0.0;     // check-specific observed range
    double max_value = 0.0;
    std::string detail;         // first offending instance, or a summary
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool passed() const noexcept;
    const CheckResult* find(const std::string& name) const noexcept;
};

/// "check,passed,gating,samples,violations,skipped,min,max,detail".
void write_validation_csv(std::ostream& out, const ValidationReport& report);
/// Aligned pass/fail table for humans.
void write_validation_text(std::ostream& out, const ValidationReport& report);

/// The usual hyper-parameter grid for lambda1 and lambda2.
const std::vector<double>& lambda_grid();

/// Grid pairs (lambda1, lambda2) satisfying m - 3 < lambda2 / lambda1.
std::vector<std::pair<double, double>> admissible_lambdas(int arity);

/// Random node statistics built by streaming synthetic examples through the
/// node update with hard 0/1 margins, so every NodeStats invariant holds.
class SplitSampler {
public:
    SplitSampler(int arity, std::uint64_t seed);

    /// Mixes per-label (pure-leaning) routing, per-example random routing and
    /// single-direction routing with a random chance of multi-way sends.
    NodeStats next();

    /// Every base example is replayed under all M cyclic shifts of its mask,
    /// which equalises the marginals: beta = 0 up to rounding. Half of the
    /// draws give each shifted copy fresh label ids so pure splits occur.
    NodeStats next_balanced();

    Rng& rng() noexcept { return rng_; }

private:
    std::uint32_t random_mask(double multiway);

    int arity_;
    Rng rng_;
};

/// Each of M labels goes only to its own child, equal counts.
NodeStats perfect_split(int arity);
/// Every example goes to every child.
NodeStats all_to_all_split(int arity);

struct SuiteConfig {
    int arity = 2;
    std::size_t n_samples = 10000;
    std::uint64_t seed = 1;
    /// Sampled uniformly per instance. Empty means admissible_lambdas(arity).
    std::vector<std::pair<double, double>> lambdas;
};

/// J within [-lambda1 (M-1), lambda2 (M-1)] on every sample (1e-9 slack),
/// plus the two constructed extremes hit exactly.
std::vector<CheckResult> check_objective_bounds(const SuiteConfig& cfg);

/// beta <= J - J_purity on every sample and beta <= J - J* on pure ones;
/// alpha <= (J - J_balance + lambda2) * 2 / (M (2 lambda2 - lambda1 (M-1)))
/// on samples meeting lambda1 (M-1) + J_balance >= lambda2 >= lambda1 (M-1) / 2,
/// collecting n_samples qualifying ones. Also reports, as a diagnostic,
/// alpha <= (J - J_balance + lambda2) / (M (lambda2 - lambda1 (M-1))) for
/// lambda2 > lambda1 (M-1).
std::vector<CheckResult> check_beta_alpha_lemmas(const SuiteConfig& cfg);

struct WhaMeasure {
    double gamma = 0.0; // sum_i pi_i |P_R^i - P_L^i|; M-ary: sum over all ordered child pairs
    double b = 0.0;     // |sum_j P_j - 1|
};

WhaMeasure measure_wha(const NodeStats& stats);

/// Fraction of examples reaching each leaf, keyed by leaf id.
std::map<NodeId, double> leaf_weights(const Tree& tree, const Dataset& data);

/// Largest leaf weight times (internal nodes + 1).
double max_leaf_weight(const Tree& tree, const Dataset& data);

struct LeafSubsetGroup {
    std::vector<NodeId> leaves;            // exact set of reached leaves
    double weight = 0.0;                   // fraction of examples
    std::map<LabelId, double> label_dist;  // normalised label frequencies
};

struct LeafSubsetProfile {
    std::vector<LeafSubsetGroup> groups;
};

/// Groups examples by the set of leaves they reach. Examples without labels
/// are ignored.
LeafSubsetProfile leaf_subset_profile(const Tree& tree, const Dataset& data);
/// sum over groups of weight * H(label_dist), natural log.
double tree_entropy(const LeafSubsetProfile& profile);

struct ErrorRate {
    double error = 0.0;       // 1 - P@r
    std::size_t used = 0;     // examples with at least r labels
    std::size_t skipped = 0;
};

/// Training error of the tree's own top-r prediction.
ErrorRate training_error(const Tree& tree, const Dataset& data, std::size_t r);

struct EntropyBound {
    double error = 0.0;
    double entropy = 0.0;
    double bound = 0.0; // entropy / (r ln 2)
    std::size_t used = 0;
    std::size_t skipped = 0;
    bool holds = true;
};

/// epsilon_r <= G / (r ln 2), both over the examples with at least r labels.
EntropyBound check_error_entropy_bound(const Tree& tree, const Dataset& data, std::size_t r);

/// Training epsilon_1 before any split and after each of the first n_splits
/// expansions (fewer if the tree stops growing). params.max_nodes is
/// replaced by 1 + n_splits * M.
std::vector<double> monotone_error_trace(const Dataset& data, const TreeParams& params, std::size_t n_splits);

/// True when no entry exceeds its predecessor by more than tol.
bool non_increasing(const std::vector<double>& trace, double tol = 1e-12);

/// sum_j P_j against sum_i pi_i sum_j P_j^i at every trained node.
CheckResult check_total_law(const Tree& tree, double tol = 1e-6);

/// Compares pi_i = l_v[i] / C_v with the alternative normalisation by the
/// dataset-wide mean label count, l_v[i] / (E * N_v * mean |y|), at every
/// trained node. Reports the largest pi and objective differences.
struct PiDivergence {
    std::size_t nodes = 0;
    double max_pi_diff = 0.0;
    double max_objective_diff = 0.0;
    double mean_objective_diff = 0.0;
};

PiDivergence pi_divergence(const Tree& tree, const Dataset& data);

struct ValidationConfig {
    std::size_t n_samples = 10000;
    std::uint64_t seed = 1;
    bool lemma_suites = true;
    bool synthetic = true; // separable build, monotone trace, entropy bound
    std::size_t top_r = 1; // r for the entropy bound on a supplied model
};

/// Runs the configured suites. When tree and data are given, the entropy
/// bound, leaf weight and total law are also checked on them.
ValidationReport run_validation(const ValidationConfig& cfg, const Tree* tree = nullptr, const Dataset* data = nullptr);

} // namespace ldsm
