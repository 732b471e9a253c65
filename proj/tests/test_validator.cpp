/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ldsm/synthetic.hpp"
#include "ldsm/validator.hpp"

using namespace ldsm;

namespace {

// Root splits on feature 0: examples with it go left, the rest go right.
Tree two_leaf_tree(LabelHistogram left, LabelHistogram right, std::size_t labels) {
    TreeNode root;
    root.children = {1, 2};
    root.features = {0};
    root.regressors.emplace_back(std::vector<double>{10.0, -5.0});
    root.regressors.emplace_back(std::vector<double>{-10.0, 5.0});
    TreeNode l, r;
    l.id = 1;
    r.id = 2;
    l.parent = r.parent = 0;
    l.depth = r.depth = 1;
    l.histogram = std::move(left);
    r.histogram = std::move(right);
    return Tree::from_nodes(TreeParams{}, 2, labels, {root, l, r});
}

Tree single_leaf(std::size_t labels, LabelHistogram hist = {}) {
    TreeNode n;
    n.histogram = std::move(hist);
    return Tree::from_nodes(TreeParams{}, 2, labels, {n});
}

Dataset two_groups() {
    Dataset d;
    d.num_features = 2;
    d.num_labels = 2;
    for (int i = 0; i < 2; ++i) d.examples.push_back({SparseVector({{0, 1.0}}), {0}});
    for (int i = 0; i < 2; ++i) d.examples.push_back({SparseVector({{1, 1.0}}), {1}});
    return d;
}

NodeStats random_stats(Rng& rng, int m) {
    NodeStats s(m);
    std::vector<double> margins(static_cast<std::size_t>(m));
    for (int e = 0; e < 10; ++e) {
        const std::vector<LabelId> y{static_cast<LabelId>(rng.below(4))};
        s.observe(y);
        for (auto& v : margins) v = rng.uniform();
        s.record_margins(y, margins);
    }
    return s;
}

} // namespace

TEST_CASE("constructed extremes hit the objective range exactly") {
    for (int m = 2; m <= 5; ++m) {
        const double l1 = 0.5 * m, l2 = 1.5 * m;
        CHECK(compute_objective(perfect_split(m), {m, l1, l2}) == doctest::Approx(-l1 * (m - 1)));
        CHECK(compute_objective(all_to_all_split(m), {m, l1, l2}) == doctest::Approx(l2 * (m - 1)));
        CHECK(balancedness(perfect_split(m)) == doctest::Approx(0.0));
        CHECK(purity(perfect_split(m)) == doctest::Approx(0.0));
    }
}

TEST_CASE("admissible lambdas respect m - 3 < lambda2 / lambda1") {
    CHECK(admissible_lambdas(2).size() == lambda_grid().size() * lambda_grid().size());
    for (const auto& [l1, l2] : admissible_lambdas(4)) CHECK(1.0 < l2 / l1);
    CHECK(admissible_lambdas(4).size() < admissible_lambdas(2).size());
}

TEST_CASE("sampled splits satisfy the node invariants") {
    for (int m : {2, 3, 4}) {
        SplitSampler sampler(m, 9);
        for (int n = 0; n < 300; ++n) {
            const NodeStats s = n % 2 ? sampler.next_balanced() : sampler.next();
            double pi_sum = 0.0;
            for (std::size_t k = 0; k < s.num_labels(); ++k) pi_sum += s.pi_at(k);
            CHECK(std::abs(pi_sum - 1.0) < 1e-9);
            if (n % 2) CHECK(balancedness(s) < 1e-12);
        }
    }
}

TEST_CASE("binary objective bounds hold on random splits") {
    SuiteConfig cfg;
    cfg.arity = 2;
    cfg.n_samples = 10000;
    const auto res = check_objective_bounds(cfg);
    REQUIRE(res.size() == 2);
    CHECK(res[0].passed);
    CHECK(res[0].samples == 10000);
    CHECK(res[1].passed);
}

TEST_CASE("beta bounds hold") {
    for (int m : {2, 4}) {
        SuiteConfig cfg;
        cfg.arity = m;
        cfg.n_samples = 3000;
        const auto res = check_beta_alpha_lemmas(cfg);
        CHECK(res[0].name == "beta_fixed_purity_m" + std::to_string(m));
        CHECK(res[0].passed);
        CHECK(res[1].passed);
        CHECK(res[1].samples > 0);
        CHECK(res[4].passed); // corrected alpha bound
    }
}

TEST_CASE("fixed-balance alpha bound fails on a pure balanced binary split") {
    // lambda1 = 1.5, lambda2 = 1 meets lambda1 + B >= lambda2 >= lambda1 / 2,
    // yet the bound (J - B + lambda2) * 2 / (2 (2 lambda2 - lambda1)) is -1.
    const NodeStats s = perfect_split(2);
    const auto t = objective_terms(s);
    const double l1 = 1.5, l2 = 1.0;
    const double j = t.value(l1, l2);
    CHECK(j == doctest::Approx(-1.5));
    const double rhs = (j - t.balance + l2) * 2.0 / (2.0 * (2.0 * l2 - l1));
    CHECK(rhs == doctest::Approx(-1.0));
    CHECK(purity(s) > rhs);

    SuiteConfig cfg;
    cfg.arity = 2;
    cfg.n_samples = 500;
    cfg.lambdas = {{l1, l2}};
    const auto res = check_beta_alpha_lemmas(cfg);
    CHECK_FALSE(res[2].passed);
    CHECK(res[2].violations > 0);
}

TEST_CASE("degenerate lambda2 = lambda1 (M-1) / 2 is skipped") {
    SuiteConfig cfg;
    cfg.arity = 2;
    cfg.n_samples = 20;
    cfg.lambdas = {{2.0, 1.0}};
    const auto res = check_beta_alpha_lemmas(cfg);
    CHECK(res[2].samples == 0);
    CHECK(res[2].skipped == 2000);
}

TEST_CASE("weak hypothesis measures") {
    const auto pure = measure_wha(perfect_split(2));
    CHECK(pure.gamma == doctest::Approx(1.0));
    CHECK(pure.b == doctest::Approx(0.0));
    const auto both = measure_wha(all_to_all_split(2));
    CHECK(both.gamma == doctest::Approx(0.0));
    CHECK(both.b == doctest::Approx(1.0));
    Rng rng(4);
    for (int m : {2, 3}) {
        for (int t = 0; t < 50; ++t) {
            const NodeStats s = random_stats(rng, m);
            double gamma = 0.0, total = 0.0;
            for (double p : s.marginals()) total += p;
            for (LabelId l : s.labels()) {
                const auto c = s.conditionals(l);
                double spread = 0.0;
                if (m == 2) {
                    spread = std::abs(c[0] - c[1]);
                } else {
                    for (double a : c)
                        for (double b : c) spread += std::abs(a - b);
                }
                gamma += s.pi(l) * spread;
            }
            const auto w = measure_wha(s);
            CHECK(w.gamma == doctest::Approx(gamma).epsilon(1e-12));
            CHECK(w.b == doctest::Approx(std::abs(total - 1.0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("leaf weight") {
    const Dataset d = two_groups();
    CHECK(max_leaf_weight(single_leaf(2), d) == doctest::Approx(1.0));
    const Tree t = two_leaf_tree({{0, 2}}, {{1, 2}}, 2);
    const auto w = leaf_weights(t, d);
    CHECK(w.at(1) == doctest::Approx(0.5));
    CHECK(w.at(2) == doctest::Approx(0.5));
    CHECK(max_leaf_weight(t, d) == doctest::Approx(1.0));
}

TEST_CASE("leaf subset entropy") {
    const Dataset d = two_groups();
    CHECK(tree_entropy(leaf_subset_profile(two_leaf_tree({{0, 2}}, {{1, 2}}, 2), d)) == doctest::Approx(0.0));
    CHECK(tree_entropy(leaf_subset_profile(single_leaf(2), d)) == doctest::Approx(std::numbers::ln2));

    Dataset one_label = d;
    for (auto& ex : one_label.examples) ex.labels = {1};
    CHECK(tree_entropy(leaf_subset_profile(single_leaf(2), one_label)) == doctest::Approx(0.0));

    Dataset uniform;
    uniform.num_features = 2;
    uniform.num_labels = 5;
    for (LabelId k = 0; k < 5; ++k) uniform.examples.push_back({SparseVector({{0, 1.0}}), {k}});
    CHECK(tree_entropy(leaf_subset_profile(single_leaf(5), uniform)) == doctest::Approx(std::log(5.0)));

    const auto prof = leaf_subset_profile(two_leaf_tree({{0, 2}}, {{1, 2}}, 2), d);
    double total = 0.0;
    for (const auto& g : prof.groups) total += g.weight;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("error entropy bound") {
    const Dataset d = two_groups();
    const auto root = check_error_entropy_bound(single_leaf(2, {{0, 2}, {1, 2}}), d, 1);
    CHECK(root.error == doctest::Approx(0.5));
    CHECK(root.bound == doctest::Approx(1.0));
    CHECK(root.holds);
    const auto split = check_error_entropy_bound(two_leaf_tree({{0, 2}}, {{1, 2}}, 2), d, 1);
    CHECK(split.error == doctest::Approx(0.0));
    CHECK(split.holds);

    RandomMultilabelOptions opts;
    opts.num_examples = 300;
    const Dataset data = make_random_multilabel(opts, 12);
    for (std::size_t r : {1u, 2u, 3u}) {
        TreeParams p;
        p.max_nodes = 40;
        p.epochs = 2;
        p.seed = r;
        const auto res = check_error_entropy_bound(build_tree(data, p), data, r);
        CHECK(res.holds);
        CHECK(res.used + res.skipped == data.size());
    }
}

TEST_CASE("training error decreases on separable data") {
    const Dataset d = make_orthogonal_classes(8, 256);
    TreeParams p;
    p.epochs = 5;
    const auto trace = monotone_error_trace(d, p, 12);
    REQUIRE(trace.size() >= 2);
    CHECK(trace.front() == doctest::Approx(7.0 / 8.0));
    CHECK(non_increasing(trace));
    CHECK(trace.back() == doctest::Approx(0.0));
    CHECK_FALSE(non_increasing({0.5, 0.6}));
}

TEST_CASE("total law and pi normalisation on a built tree") {
    const Dataset d = make_orthogonal_classes(4, 64);
    TreeParams p;
    p.max_nodes = 15;
    const Tree t = build_tree(d, p);
    const auto law = check_total_law(t);
    CHECK(law.passed);
    CHECK(law.samples == t.internal_count());
    const auto div = pi_divergence(t, d);
    CHECK(div.nodes == t.internal_count());
    CHECK(div.max_pi_diff < 1e-12); // single-label data: both normalisations agree
}

TEST_CASE("report aggregation ignores diagnostics") {
    ValidationReport rep;
    CheckResult ok;
    ok.name = "a";
    CheckResult diag;
    diag.name = "b";
    diag.gating = false;
    diag.passed = false;
    rep.checks = {ok, diag};
    CHECK(rep.passed());
    CHECK(rep.find("b") != nullptr);
    CHECK(rep.find("c") == nullptr);
    rep.checks[0].passed = false;
    CHECK_FALSE(rep.passed());
    std::ostringstream out;
    write_validation_csv(out, rep);
    CHECK(out.str().rfind("check,passed,gating,samples,violations,skipped,min,max,detail\n", 0) == 0);
}

TEST_CASE("full validation run reports every suite") {
    ValidationConfig cfg;
    cfg.n_samples = 400;
    const ValidationReport rep = run_validation(cfg);
    for (const char* name : {"objective_bounds_m2", "objective_bounds_m4", "beta_fixed_purity_m2", "alpha_fixed_balance_m4",
                             "separable_training_p1", "separable_depth", "monotone_error_trace",
                             "entropy_error_bound_separable", "total_law_separable", "leaf_weight_c_separable"})
        CHECK_MESSAGE(rep.find(name) != nullptr, name);
    CHECK(rep.find("separable_training_p1")->passed);
    CHECK(rep.find("monotone_error_trace")->passed);
    CHECK(rep.find("entropy_error_bound_separable")->passed);
    CHECK(rep.find("objective_bounds_m2")->passed);
}
