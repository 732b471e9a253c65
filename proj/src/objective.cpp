/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ldsm {

std::vector<std::string> check_objective_params(const ObjectiveParams& params) {
    if (params.arity < 2 || params.arity > kMaxArity)
        throw std::invalid_argument("arity must be in [2, " + std::to_string(kMaxArity) + "], got " +
                                    std::to_string(params.arity));
    if (!(params.lambda1 >= 0.0) || !(params.lambda2 >= 0.0))
        throw std::invalid_argument("lambda1 and lambda2 must be non-negative");

    std::vector<std::string> warnings;
    if (params.lambda1 > 0.0 && params.arity - 3 >= params.lambda2 / params.lambda1) {
        warnings.push_back("arity - 3 >= lambda2 / lambda1: the balanced and pure split is no longer "
                           "guaranteed to minimise the objective; consider a larger lambda2");
    }
    return warnings;
}

NodeStats::NodeStats(int arity) : arity_(arity), marginals_(static_cast<std::size_t>(arity), 0.0) {
    if (arity < 2 || arity > kMaxArity) throw std::invalid_argument("arity out of range");
}

std::optional<std::size_t> NodeStats::slot(LabelId label) const {
    auto it = slots_.find(label);
    if (it == slots_.end()) return std::nullopt;
    return it->second;
}

double NodeStats::label_count(LabelId label) const {
    auto s = slot(label);
    return s ? counts_[*s] : 0.0;
}

std::vector<double> NodeStats::conditionals(LabelId label) const {
    auto s = slot(label);
    if (!s) return std::vector<double>(static_cast<std::size_t>(arity_), 0.0);
    auto c = conditionals_at(*s);
    return {c.begin(), c.end()};
}

double NodeStats::pi(LabelId label) const {
    if (label_mass_ <= 0.0) return 0.0;
    return label_count(label) / label_mass_;
}

std::size_t NodeStats::ensure_slot(LabelId label) {
    auto [it, inserted] = slots_.try_emplace(label, static_cast<std::uint32_t>(label_ids_.size()));
    if (inserted) {
        label_ids_.push_back(label);
        counts_.push_back(0.0);
        conditionals_.resize(conditionals_.size() + static_cast<std::size_t>(arity_), 0.0);
    }
    return it->second;
}

void NodeStats::observe(std::span<const LabelId> labels) {
    label_mass_ += static_cast<double>(labels.size());
    for (LabelId k : labels) counts_[ensure_slot(k)] += 1.0;
}

void NodeStats::record_margins(std::span<const LabelId> labels, std::span<const double> margins) {
    const auto m = static_cast<std::size_t>(arity_);
    const double ny = static_cast<double>(labels.size());
    for (std::size_t j = 0; j < m; ++j)
        marginals_[j] = ((label_mass_ - ny) * marginals_[j] + ny * margins[j]) / label_mass_;
    for (LabelId k : labels) {
        const std::size_t s = slots_.at(k);
        const double lk = counts_[s];
        double* cond = conditionals_.data() + s * m;
        for (std::size_t j = 0; j < m; ++j) cond[j] = ((lk - 1.0) * cond[j] + margins[j]) / lk;
    }
}

void NodeStats::set_marginals(std::span<const double> marginals) {
    if (marginals.size() != marginals_.size()) throw std::invalid_argument("marginals size != arity");
    std::copy(marginals.begin(), marginals.end(), marginals_.begin());
}

void NodeStats::set_label(LabelId label, double count, std::span<const double> conditionals) {
    if (conditionals.size() != static_cast<std::size_t>(arity_))
        throw std::invalid_argument("conditionals size != arity");
    const std::size_t s = ensure_slot(label);
    counts_[s] = count;
    std::copy(conditionals.begin(), conditionals.end(),
              conditionals_.begin() + static_cast<std::ptrdiff_t>(s * conditionals.size()));
}

namespace {

double pairwise_spread(const double* v, std::size_t m) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = j + 1; l < m; ++l) s += std::abs(v[j] - v[l]);
    return s;
}

} // namespace

ObjectiveTerms objective_terms(const NodeStats& stats) {
    if (!(stats.label_mass() > 0.0)) throw EmptyNodeError();
    const auto m = static_cast<std::size_t>(stats.arity());
    const auto p = stats.marginals();

    ObjectiveTerms t;
    t.balance = pairwise_spread(p.data(), m);
    for (std::size_t s = 0; s < stats.num_labels(); ++s)
        t.class_integrity += stats.pi_at(s) * pairwise_spread(stats.conditionals_at(s).data(), m);
    double total = 0.0;
    for (double v : p) total += v;
    t.multiway = std::abs(total - 1.0);
    return t;
}

double compute_objective(const NodeStats& stats, const ObjectiveParams& params) {
    return objective_terms(stats).value(params.lambda1, params.lambda2);
}

DirectionMask best_direction_subset(const NodeStats& stats, std::span<const LabelId> labels,
                                    const ObjectiveParams& params) {
    if (labels.empty()) throw std::invalid_argument("example has no labels");
    const double mass = stats.label_mass();
    if (!(mass > 0.0)) throw EmptyNodeError();

    const auto m = static_cast<std::size_t>(stats.arity());
    const double ny = static_cast<double>(labels.size());
    const auto p = stats.marginals();

    // Hypothetical value = base + (bit set ? step : 0).
    std::array<double, kMaxArity> p_base{};
    const double p_step = ny / mass;
    for (std::size_t j = 0; j < m; ++j) p_base[j] = (mass - ny) * p[j] / mass;

    struct LabelTerm {
        double weight; // l_v[k] / C_v
        double step;   // 1 / l_v[k]
        std::array<double, kMaxArity> base;
    };
    std::vector<LabelTerm> terms;
    terms.reserve(labels.size());
    for (LabelId k : labels) {
        auto s = stats.slot(k);
        if (!s) throw std::logic_error("label not observed at node before subset search");
        const double lk = stats.count_at(*s);
        const auto cond = stats.conditionals_at(*s);
        LabelTerm term{lk / mass, 1.0 / lk, {}};
        for (std::size_t j = 0; j < m; ++j) term.base[j] = (lk - 1.0) * cond[j] / lk;
        terms.push_back(term);
    }

    const std::uint32_t n_masks = (1u << m) - 1u;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 1;
    std::array<double, kMaxArity> hyp{};
    for (std::uint32_t s = 1; s <= n_masks; ++s) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            hyp[j] = p_base[j] + (((s >> j) & 1u) ? p_step : 0.0);
            total += hyp[j];
        }
        const double balance = pairwise_spread(hyp.data(), m);
        const double multiway = std::abs(total - 1.0);

        double ci = 0.0;
        for (const auto& term : terms) {
            for (std::size_t j = 0; j < m; ++j) hyp[j] = term.base[j] + (((s >> j) & 1u) ? term.step : 0.0);
            ci += term.weight * pairwise_spread(hyp.data(), m);
        }

        const double j_value = balance - params.lambda1 * ci + params.lambda2 * multiway;
        if (j_value < best) {
            best = j_value;
            best_mask = s;
        }
    }
    return DirectionMask(best_mask);
}

double balancedness(const NodeStats& stats) {
    const auto p = stats.marginals();
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= static_cast<double>(p.size());
    double beta = 0.0;
    for (double v : p) beta = std::max(beta, std::abs(v - mean));
    return beta;
}

double purity(const NodeStats& stats) {
    const auto m = static_cast<std::size_t>(stats.arity());
    if (!(stats.label_mass() > 0.0)) return 0.0;
    double alpha = 0.0;
    for (std::size_t s = 0; s < stats.num_labels(); ++s) {
        const auto cond = stats.conditionals_at(s);
        double total = 0.0;
        for (double v : cond) total += v;
        double inner = 0.0;
        for (std::size_t j = 0; j < m; ++j) inner += std::min(cond[j], total - cond[j]);
        alpha += stats.pi_at(s) * inner;
    }
    return alpha / static_cast<double>(m);
}

} // namespace ldsm
