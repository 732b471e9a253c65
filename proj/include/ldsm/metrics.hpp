/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ldsm/sparse.hpp"
#include "ldsm/tree.hpp"

namespace ldsm {

/// Ranked labels for one example, highest score first.
using Ranking = std::vector<ScoredLabel>;
using LabelSet = std::vector<LabelId>; // sorted, unique

/// Per-example scores. Gold sets must be sorted; pred may be shorter than k.
double precision_at_k(const Ranking& pred, const LabelSet& gold, std::size_t k);
double ndcg_at_k(const Ranking& pred, const LabelSet& gold, std::size_t k);

/// Means over examples with a non-empty gold set. Empty-gold examples are
/// skipped (see count_empty_gold); the result is 0 if none remain. Throws
/// std::invalid_argument when k == 0 or the lengths differ.
double precision_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k);
double ndcg_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k);
std::size_t count_empty_gold(std::span<const LabelSet> gold) noexcept;

struct PropensityParams {
    double a = 0.55;
    double b = 1.5;
};

/// 1 / p_l with p_l = 1 / (1 + C (N_l + b)^-a) and C = (ln n - 1)(b + 1)^a.
/// Throws std::invalid_argument when n <= e, since C would not be positive.
std::vector<double> inverse_propensities(std::span<const std::size_t> label_counts, std::size_t n,
                                         PropensityParams params = {});

/// Occurrences of every label in the training set, length num_labels.
std::vector<std::size_t> label_counts(const Dataset& data);

/// Whitespace-separated inverse propensities, one per label.
std::vector<double> read_propensities(std::istream& in);
std::vector<double> load_propensities(const std::string& path);

/// Propensity-scored P@k and nDCG@k, as ratios of dataset totals: weighted
/// hits over the best weighted score attainable at k. Equal propensities give
/// nDCG@k exactly, and P@k whenever every gold set has at least k labels.
double psp_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k,
                std::span<const double> inv_prop);
double psn_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k,
                std::span<const double> inv_prop);

struct MetricValue {
    std::string metric;
    std::size_t k;
    double value;
};

struct EvalReport {
    std::vector<MetricValue> values;
    std::size_t examples = 0;
    std::size_t empty_gold = 0; // excluded from every mean
    double seconds = 0.0;        // prediction wall clock, filled in by the caller

    /// NaN when the metric was not computed.
    double get(const std::string& metric, std::size_t k) const noexcept;
};

/// P@k and nDCG@k for every k, plus PSP@k / PSN@k when inv_prop is non-empty.
EvalReport evaluate(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::span<const std::size_t> ks,
                    std::span<const double> inv_prop = {});

/// "metric,k,value" rows with a header line.
void write_report_csv(std::ostream& out, const EvalReport& report);

std::vector<LabelSet> gold_labels(const Dataset& data);

/// One line per example: space-separated "label:score", best first.
void write_predictions(std::ostream& out, std::span<const Ranking> preds);
void save_predictions(const std::string& path, std::span<const Ranking> preds);
/// Throws ParseError for malformed lines.
std::vector<Ranking> read_predictions(std::istream& in);
std::vector<Ranking> load_predictions(const std::string& path);

} // namespace ldsm
