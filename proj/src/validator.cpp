/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/validator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ldsm/synthetic.hpp"

namespace ldsm {

namespace {

constexpr double kTol = 1e-9;

std::string describe(const NodeStats& s, double l1, double l2) {
    std::ostringstream out;
    out << std::setprecision(17) << "lambda1=" << l1 << " lambda2=" << l2 << " C=" << s.label_mass() << " P=[";
    for (std::size_t j = 0; j < s.marginals().size(); ++j) out << (j ? " " : "") << s.marginals()[j];
    out << "]";
    const std::size_t shown = std::min<std::size_t>(s.num_labels(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
        out << " label" << s.labels()[i] << "(l=" << s.count_at(i) << ")=[";
        const auto c = s.conditionals_at(i);
        for (std::size_t j = 0; j < c.size(); ++j) out << (j ? " " : "") << c[j];
        out << "]";
    }
    if (shown < s.num_labels()) out << " ...";
    return out.str();
}

void observe_value(CheckResult& r, double v) {
    if (r.samples == 0 && r.violations == 0) {
        r.min_value = r.max_value = v;
    } else {
        r.min_value = std::min(r.min_value, v);
        r.max_value = std::max(r.max_value, v);
    }
}

void record(CheckResult& r, bool ok, double value, const NodeStats* s = nullptr, double l1 = 0, double l2 = 0) {
    observe_value(r, value);
    ++r.samples;
    if (!ok) {
        if (r.violations == 0 && s) r.detail = describe(*s, l1, l2);
        ++r.violations;
        r.passed = false;
    }
}

CheckResult named(std::string name, bool gating = true) {
    CheckResult r;
    r.name = std::move(name);
    r.gating = gating;
    return r;
}

std::string suffix(int arity) { return "_m" + std::to_string(arity); }

std::pair<double, double> pick(const std::vector<std::pair<double, double>>& lambdas, Rng& rng) {
    return lambdas[rng.below(lambdas.size())];
}

std::vector<std::pair<double, double>> lambdas_of(const SuiteConfig& cfg) {
    auto l = cfg.lambdas.empty() ? admissible_lambdas(cfg.arity) : cfg.lambdas;
    if (l.empty()) throw std::invalid_argument("no lambda pair to sample");
    return l;
}

std::uint32_t rotate(std::uint32_t mask, int shift, int m) {
    if (shift == 0) return mask;
    const std::uint32_t full = (1u << m) - 1u;
    return ((mask << shift) | (mask >> (m - shift))) & full;
}

} // namespace

bool ValidationReport::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed || !c.gating; });
}

const CheckResult* ValidationReport::find(const std::string& name) const noexcept {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
    out << "check,passed,gating,samples,violations,skipped,min,max,detail\n";
    for (const auto& c : report.checks) {
        std::string detail = c.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        out << c.name << ',' << (c.passed ? 1 : 0) << ',' << (c.gating ? 1 : 0) << ',' << c.samples << ','
            << c.violations << ',' << c.skipped << ',' << std::setprecision(17) << c.min_value << ',' << c.max_value
            << ",\"" << detail << "\"\n";
    }
}

void write_validation_text(std::ostream& out, const ValidationReport& report) {
    std::size_t width = 5;
    for (const auto& c : report.checks) width = std::max(width, c.name.size());
    for (const auto& c : report.checks) {
        const char* verdict = c.passed ? "PASS" : (c.gating ? "FAIL" : "WARN");
        out << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << verdict << "  n=" << c.samples
            << " violations=" << c.violations << " skipped=" << c.skipped << std::setprecision(6)
            << " range=[" << c.min_value << ", " << c.max_value << "]\n";
        if (!c.detail.empty()) out << std::string(width + 2, ' ') << c.detail << '\n';
    }
    out << (report.passed() ? "validation passed" : "validation FAILED") << '\n';
}

const std::vector<double>& lambda_grid() {
    static const std::vector<double> grid{0.5, 1.0, 1.5, 2.0, 4.0};
    return grid;
}

std::vector<std::pair<double, double>> admissible_lambdas(int arity) {
    std::vector<std::pair<double, double>> out;
    for (double l1 : lambda_grid())
        for (double l2 : lambda_grid())
            if (static_cast<double>(arity - 3) < l2 / l1) out.emplace_back(l1, l2);
    return out;
}

SplitSampler::SplitSampler(int arity, std::uint64_t seed) : arity_(arity), rng_(seed) {
    if (arity < 2 || arity > kMaxArity) throw std::invalid_argument("arity out of range");
}

std::uint32_t SplitSampler::random_mask(double multiway) {
    const std::uint32_t full = (1u << arity_) - 1u;
    if (rng_.bernoulli(multiway)) {
        std::uint32_t mask;
        do {
            mask = 1u + static_cast<std::uint32_t>(rng_.below(full));
        } while (__builtin_popcount(mask) < 2);
        return mask;
    }
    return 1u << rng_.below(static_cast<std::uint64_t>(arity_));
}

namespace {

struct BaseExample {
    std::vector<LabelId> labels;
    std::uint32_t mask;
};

void stream(NodeStats& stats, const BaseExample& ex, std::uint32_t mask, int m) {
    std::array<double, kMaxArity> margins{};
    for (int j = 0; j < m; ++j) margins[static_cast<std::size_t>(j)] = (mask >> j) & 1u;
    stats.observe(ex.labels);
    stats.record_margins(ex.labels, std::span<const double>(margins.data(), static_cast<std::size_t>(m)));
}

} // namespace

NodeStats SplitSampler::next() {
    const auto n_labels = 1 + rng_.below(8);
    const auto n_examples = 1 + rng_.below(64);
    const double multiway = rng_.uniform();
    const auto mode = rng_.below(3);

    std::vector<std::uint32_t> label_mask(n_labels);
    for (auto& mk : label_mask) mk = random_mask(multiway);

    NodeStats stats(arity_);
    for (std::uint64_t e = 0; e < n_examples; ++e) {
        BaseExample ex;
        const auto count = 1 + rng_.below(std::min<std::uint64_t>(3, n_labels));
        while (ex.labels.size() < count) {
            const auto l = static_cast<LabelId>(rng_.below(n_labels));
            if (std::find(ex.labels.begin(), ex.labels.end(), l) == ex.labels.end()) ex.labels.push_back(l);
        }
        std::sort(ex.labels.begin(), ex.labels.end());
        if (mode == 0) ex.mask = label_mask[ex.labels.front()];
        else if (mode == 1) ex.mask = random_mask(multiway);
        else ex.mask = random_mask(0.0);
        stream(stats, ex, ex.mask, arity_);
    }
    return stats;
}

NodeStats SplitSampler::next_balanced() {
    const auto n_labels = 1 + rng_.below(8);
    const auto n_examples = 1 + rng_.below(16);
    const double multiway = rng_.uniform();
    const bool per_label = rng_.bernoulli(0.5);
    // Relabelled copies keep per-label routing, and so purity, intact.
    const bool relabel = rng_.bernoulli(0.5);
    std::vector<std::uint32_t> label_mask(n_labels);
    for (auto& mk : label_mask) mk = random_mask(multiway);

    NodeStats stats(arity_);
    for (std::uint64_t e = 0; e < n_examples; ++e) {
        BaseExample ex;
        const auto count = 1 + rng_.below(std::min<std::uint64_t>(3, n_labels));
        while (ex.labels.size() < count) {
            const auto l = static_cast<LabelId>(rng_.below(n_labels));
            if (std::find(ex.labels.begin(), ex.labels.end(), l) == ex.labels.end()) ex.labels.push_back(l);
        }
        std::sort(ex.labels.begin(), ex.labels.end());
        ex.mask = per_label ? label_mask[ex.labels.front()] : random_mask(multiway);
        for (int s = 0; s < arity_; ++s) {
            BaseExample copy = ex;
            if (relabel)
                for (auto& l : copy.labels) l += static_cast<LabelId>(static_cast<std::uint64_t>(s) * n_labels);
            stream(stats, copy, rotate(ex.mask, s, arity_), arity_);
        }
    }
    return stats;
}

NodeStats perfect_split(int arity) {
    NodeStats stats(arity);
    for (int j = 0; j < arity; ++j) stream(stats, {{static_cast<LabelId>(j)}, 1u << j}, 1u << j, arity);
    return stats;
}

NodeStats all_to_all_split(int arity) {
    NodeStats stats(arity);
    const std::uint32_t full = (1u << arity) - 1u;
    for (int j = 0; j < arity; ++j) stream(stats, {{static_cast<LabelId>(j)}, full}, full, arity);
    return stats;
}

std::vector<CheckResult> check_objective_bounds(const SuiteConfig& cfg) {
    const int m = cfg.arity;
    const double span = static_cast<double>(m - 1);
    const auto lambdas = lambdas_of(cfg);
    SplitSampler sampler(m, cfg.seed);

    CheckResult bounds = named("objective_bounds" + suffix(m));
    for (std::size_t n = 0; n < cfg.n_samples; ++n) {
        const NodeStats s = (n % 4 == 3) ? sampler.next_balanced() : sampler.next();
        const auto [l1, l2] = pick(lambdas, sampler.rng());
        const double j = compute_objective(s, {m, l1, l2});
        record(bounds, j >= -l1 * span - kTol && j <= l2 * span + kTol, j, &s, l1, l2);
    }

    CheckResult extremes = named("objective_extremes" + suffix(m));
    const NodeStats pure = perfect_split(m);
    const NodeStats all = all_to_all_split(m);
    for (const auto& [l1, l2] : lambdas) {
        const double jp = compute_objective(pure, {m, l1, l2});
        record(extremes, std::abs(jp + l1 * span) <= kTol, jp, &pure, l1, l2);
        const double ja = compute_objective(all, {m, l1, l2});
        record(extremes, std::abs(ja - l2 * span) <= kTol, ja, &all, l1, l2);
    }
    return {bounds, extremes};
}

std::vector<CheckResult> check_beta_alpha_lemmas(const SuiteConfig& cfg) {
    const int m = cfg.arity;
    const double md = static_cast<double>(m);
    const double span = md - 1.0;
    const auto lambdas = lambdas_of(cfg);
    SplitSampler sampler(m, cfg.seed);

    CheckResult beta = named("beta_fixed_purity" + suffix(m));
    CheckResult beta_pure = named("beta_perfectly_pure" + suffix(m));
    CheckResult alpha = named("alpha_fixed_balance" + suffix(m));
    CheckResult alpha_bal = named("alpha_perfectly_balanced" + suffix(m));
    CheckResult alpha_fix = named("alpha_corrected_bound" + suffix(m), false);

    // Draw until the alpha check has n_samples qualifying instances; the cap
    // keeps a hopeless lambda list from looping forever.
    const std::size_t cap = 100 * std::max<std::size_t>(cfg.n_samples, 1);
    for (std::size_t n = 0; n < cap && alpha.samples < cfg.n_samples; ++n) {
        const bool balanced_draw = n % 2 == 1;
        const NodeStats s = balanced_draw ? sampler.next_balanced() : sampler.next();
        const auto [l1, l2] = pick(lambdas, sampler.rng());
        const auto t = objective_terms(s);
        const double j = t.value(l1, l2);
        const double b = balancedness(s);
        const double a = purity(s);

        if (beta.samples < cfg.n_samples) record(beta, b <= t.balance + kTol, t.balance - b, &s, l1, l2);

        if (a <= 1e-12) {
            const double gap = j + l1 * span;
            record(beta_pure, b <= gap + kTol, gap - b, &s, l1, l2);
        } else {
            ++beta_pure.skipped;
        }

        const double denom = md * (2.0 * l2 - l1 * span);
        if (l1 * span + t.balance >= l2 && l2 >= l1 * span / 2.0 && denom > 0.0) {
            const double rhs = (j - t.balance + l2) * 2.0 / denom;
            record(alpha, a <= rhs + kTol, rhs - a, &s, l1, l2);
        } else {
            ++alpha.skipped;
        }

        if (balanced_draw && b <= 1e-12) {
            if (l1 * span >= l2 && l2 >= l1 * span / 2.0 && denom > 0.0) {
                const double rhs = (j + l2) * 2.0 / denom;
                record(alpha_bal, a <= rhs + kTol, rhs - a, &s, l1, l2);
            } else {
                ++alpha_bal.skipped;
            }
        }

        if (l2 > l1 * span) {
            const double rhs = (j - t.balance + l2) / (md * (l2 - l1 * span));
            record(alpha_fix, a <= rhs + kTol, rhs - a, &s, l1, l2);
        } else {
            ++alpha_fix.skipped;
        }
    }
    if (alpha.samples < cfg.n_samples) {
        alpha.passed = false;
        alpha.detail = "only " + std::to_string(alpha.samples) + " qualifying samples found" +
                       (alpha.detail.empty() ? "" : "; first violation: " + alpha.detail);
    }
    return {beta, beta_pure, alpha, alpha_bal, alpha_fix};
}

WhaMeasure measure_wha(const NodeStats& stats) {
    const auto m = static_cast<std::size_t>(stats.arity());
    WhaMeasure w;
    double total = 0.0;
    for (double p : stats.marginals()) total += p;
    w.b = std::abs(total - 1.0);
    if (!(stats.label_mass() > 0.0)) return w;
    for (std::size_t s = 0; s < stats.num_labels(); ++s) {
        const auto c = stats.conditionals_at(s);
        double spread = 0.0;
        if (m == 2) {
            spread = std::abs(c[0] - c[1]);
        } else {
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l) spread += std::abs(c[j] - c[l]);
        }
        w.gamma += stats.pi_at(s) * spread;
    }
    return w;
}

std::map<NodeId, double> leaf_weights(const Tree& tree, const Dataset& data) {
    std::map<NodeId, double> w;
    if (data.empty()) return w;
    for (const auto& ex : data.examples)
        for (NodeId leaf : tree.reached_leaves(ex.features)) w[leaf] += 1.0;
    for (auto& [leaf, v] : w) v /= static_cast<double>(data.size());
    return w;
}

double max_leaf_weight(const Tree& tree, const Dataset& data) {
    double best = 0.0;
    for (const auto& [leaf, v] : leaf_weights(tree, data)) best = std::max(best, v);
    return best * static_cast<double>(tree.internal_count() + 1);
}

namespace {

LeafSubsetProfile profile_of(const Tree& tree, const Dataset& data, std::size_t min_labels) {
    struct Acc {
        std::size_t count = 0;
        std::size_t occurrences = 0;
        std::map<LabelId, double> labels;
    };
    std::map<std::vector<NodeId>, Acc> groups;
    std::size_t used = 0;
    for (const auto& ex : data.examples) {
        if (ex.labels.empty() || ex.labels.size() < min_labels) continue;
        auto leaves = tree.reached_leaves(ex.features);
        std::sort(leaves.begin(), leaves.end());
        auto& acc = groups[leaves];
        ++acc.count;
        acc.occurrences += ex.labels.size();
        for (LabelId l : ex.labels) acc.labels[l] += 1.0;
        ++used;
    }
    LeafSubsetProfile profile;
    for (auto& [leaves, acc] : groups) {
        LeafSubsetGroup g;
        g.leaves = leaves;
        g.weight = static_cast<double>(acc.count) / static_cast<double>(used);
        for (auto& [l, c] : acc.labels) g.label_dist[l] = c / static_cast<double>(acc.occurrences);
        profile.groups.push_back(std::move(g));
    }
    return profile;
}

} // namespace

LeafSubsetProfile leaf_subset_profile(const Tree& tree, const Dataset& data) { return profile_of(tree, data, 1); }

double tree_entropy(const LeafSubsetProfile& profile) {
    double g = 0.0;
    for (const auto& group : profile.groups) {
        double h = 0.0;
        for (const auto& [l, p] : group.label_dist)
            if (p > 0.0) h -= p * std::log(p);
        g += group.weight * h;
    }
    return g;
}

ErrorRate training_error(const Tree& tree, const Dataset& data, std::size_t r) {
    if (r == 0) throw std::invalid_argument("r must be >= 1");
    ErrorRate out;
    double precision = 0.0;
    for (const auto& ex : data.examples) {
        if (ex.labels.empty() || ex.labels.size() < r) {
            ++out.skipped;
            continue;
        }
        std::size_t hits = 0;
        for (const auto& p : tree.predict(ex.features, r))
            hits += std::binary_search(ex.labels.begin(), ex.labels.end(), p.label);
        precision += static_cast<double>(hits) / static_cast<double>(r);
        ++out.used;
    }
    out.error = out.used ? 1.0 - precision / static_cast<double>(out.used) : 0.0;
    return out;
}

EntropyBound check_error_entropy_bound(const Tree& tree, const Dataset& data, std::size_t r) {
    const ErrorRate e = training_error(tree, data, r);
    EntropyBound out;
    out.error = e.error;
    out.used = e.used;
    out.skipped = e.skipped;
    out.entropy = tree_entropy(profile_of(tree, data, r));
    out.bound = out.entropy / (static_cast<double>(r) * std::numbers::ln2);
    out.holds = out.error <= out.bound + kTol;
    return out;
}

std::vector<double> monotone_error_trace(const Dataset& data, const TreeParams& params, std::size_t n_splits) {
    TreeParams p = params;
    p.max_nodes = 1;
    std::vector<double> trace{training_error(build_tree(data, p), data, 1).error};
    if (n_splits == 0) return trace;

    p.max_nodes = 1 + n_splits * static_cast<std::size_t>(params.arity);
    build_tree(data, p, [&](const Tree& partial, NodeId) { trace.push_back(training_error(partial, data, 1).error); });
    return trace;
}

bool non_increasing(const std::vector<double>& trace, double tol) {
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i] > trace[i - 1] + tol) return false;
    return true;
}

CheckResult check_total_law(const Tree& tree, double tol) {
    CheckResult r = named("total_law");
    for (const auto& node : tree.nodes()) {
        if (!node.stats || !(node.stats->label_mass() > 0.0)) continue;
        const auto& s = *node.stats;
        double lhs = 0.0;
        for (double p : s.marginals()) lhs += p;
        double rhs = 0.0;
        for (std::size_t i = 0; i < s.num_labels(); ++i)
            for (double c : s.conditionals_at(i)) rhs += s.pi_at(i) * c;
        const double diff = std::abs(lhs - rhs);
        observe_value(r, diff);
        ++r.samples;
        if (diff > tol) {
            if (r.violations++ == 0) r.detail = "node " + std::to_string(node.id);
            r.passed = false;
        }
    }
    return r;
}

PiDivergence pi_divergence(const Tree& tree, const Dataset& data) {
    PiDivergence out;
    std::size_t labelled = 0;
    std::size_t occurrences = 0;
    for (const auto& ex : data.examples) {
        if (ex.labels.empty()) continue;
        ++labelled;
        occurrences += ex.labels.size();
    }
    if (labelled == 0) return out;
    const double mean_labels = static_cast<double>(occurrences) / static_cast<double>(labelled);
    const double epochs = static_cast<double>(tree.params().epochs);
    const auto params = tree.params().objective();

    double sum = 0.0;
    for (const auto& node : tree.nodes()) {
        if (!node.stats || !(node.stats->label_mass() > 0.0) || node.num_examples == 0) continue;
        const auto& s = *node.stats;
        const auto m = static_cast<std::size_t>(s.arity());
        const auto terms = objective_terms(s);
        const double scale = epochs * static_cast<double>(node.num_examples) * mean_labels;
        double ci_alt = 0.0;
        for (std::size_t i = 0; i < s.num_labels(); ++i) {
            const double alt = s.count_at(i) / scale;
            out.max_pi_diff = std::max(out.max_pi_diff, std::abs(alt - s.pi_at(i)));
            const auto c = s.conditionals_at(i);
            double spread = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = j + 1; l < m; ++l) spread += std::abs(c[j] - c[l]);
            ci_alt += alt * spread;
        }
        const double diff = params.lambda1 * std::abs(ci_alt - terms.class_integrity);
        out.max_objective_diff = std::max(out.max_objective_diff, diff);
        sum += diff;
        ++out.nodes;
    }
    if (out.nodes) out.mean_objective_diff = sum / static_cast<double>(out.nodes);
    return out;
}

namespace {

void add_tree_checks(ValidationReport& report, const std::string& tag, const Tree& tree, const Dataset& data,
                     std::size_t r) {
    const auto eb = check_error_entropy_bound(tree, data, r);
    CheckResult entropy = named("entropy_error_bound_" + tag);
    entropy.samples = eb.used;
    entropy.skipped = eb.skipped;
    entropy.min_value = eb.error;
    entropy.max_value = eb.bound;
    entropy.passed = eb.holds;
    entropy.violations = eb.holds ? 0 : 1;
    {
        std::ostringstream d;
        d << "epsilon_" << r << "=" << eb.error << " G=" << eb.entropy << " G/(r ln2)=" << eb.bound;
        entropy.detail = d.str();
    }
    report.checks.push_back(entropy);

    auto law = check_total_law(tree);
    law.name += "_" + tag;
    report.checks.push_back(law);

    CheckResult leaf = named("leaf_weight_c_" + tag);
    const double c = max_leaf_weight(tree, data);
    leaf.samples = data.size();
    leaf.min_value = leaf.max_value = c;
    leaf.passed = c > 0.0;
    leaf.detail = "c_hat=" + std::to_string(c);
    report.checks.push_back(leaf);

    if (tree.root().stats) {
        const auto w = measure_wha(*tree.root().stats);
        CheckResult wha = named("root_weak_hypothesis_" + tag, false);
        wha.samples = 1;
        wha.min_value = w.gamma;
        wha.max_value = w.b;
        wha.passed = w.gamma > 0.0;
        wha.detail = "gamma_hat=" + std::to_string(w.gamma) + " b_hat=" + std::to_string(w.b);
        report.checks.push_back(wha);
    }

    const auto pd = pi_divergence(tree, data);
    CheckResult pi = named("pi_normalisation_divergence_" + tag, false);
    pi.samples = pd.nodes;
    pi.min_value = pd.max_pi_diff;
    pi.max_value = pd.max_objective_diff;
    pi.detail = "max |pi diff|=" + std::to_string(pd.max_pi_diff) +
                " max |J diff|=" + std::to_string(pd.max_objective_diff) +
                " mean |J diff|=" + std::to_string(pd.mean_objective_diff);
    report.checks.push_back(pi);
}

} // namespace

ValidationReport run_validation(const ValidationConfig& cfg, const Tree* tree, const Dataset* data) {
    ValidationReport report;
    if (cfg.lemma_suites) {
        for (int m : {2, 4}) {
            SuiteConfig suite{m, cfg.n_samples, cfg.seed + static_cast<std::uint64_t>(m), {}};
            for (auto& c : check_objective_bounds(suite)) report.checks.push_back(std::move(c));
            for (auto& c : check_beta_alpha_lemmas(suite)) report.checks.push_back(std::move(c));
        }
    }

    if (cfg.synthetic) {
        const Dataset sep = make_orthogonal_classes(16, 1024);
        TreeParams p;
        p.arity = 2;
        p.lambda1 = p.lambda2 = 1.0;
        p.epochs = 5;
        p.max_nodes = 127;
        p.seed = cfg.seed;
        const Tree t = build_tree(sep, p);

        const auto err = training_error(t, sep, 1);
        CheckResult p1 = named("separable_training_p1");
        p1.samples = err.used;
        p1.min_value = p1.max_value = 1.0 - err.error;
        p1.passed = err.error == 0.0;
        p1.violations = p1.passed ? 0 : 1;
        report.checks.push_back(p1);

        CheckResult depth = named("separable_depth");
        depth.samples = 1;
        depth.min_value = depth.max_value = static_cast<double>(t.depth());
        depth.passed = t.depth() <= 8;
        depth.violations = depth.passed ? 0 : 1;
        report.checks.push_back(depth);

        const auto trace = monotone_error_trace(sep, p, (p.max_nodes - 1) / 2);
        CheckResult mono = named("monotone_error_trace");
        mono.samples = trace.size();
        mono.min_value = *std::min_element(trace.begin(), trace.end());
        mono.max_value = *std::max_element(trace.begin(), trace.end());
        mono.passed = non_increasing(trace) && trace.back() == 0.0;
        mono.violations = mono.passed ? 0 : 1;
        std::ostringstream d;
        for (std::size_t i = 0; i < trace.size(); ++i) d << (i ? " " : "") << trace[i];
        mono.detail = d.str();
        report.checks.push_back(mono);

        add_tree_checks(report, "separable", t, sep, 1);
    }

    if (tree && data) add_tree_checks(report, "model", *tree, *data, cfg.top_r);
    return report;
}

} // namespace ldsm
