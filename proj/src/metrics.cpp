/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ldsm/error.hpp"

namespace ldsm {

namespace {

bool in_gold(const LabelSet& gold, LabelId label) { return std::binary_search(gold.begin(), gold.end(), label); }

double discount(std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 2.0); } // rank is 0-based

void check_shapes(std::size_t preds, std::size_t gold, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (preds != gold)
        throw std::invalid_argument("prediction count " + std::to_string(preds) + " does not match gold count " +
                                    std::to_string(gold));
}

double ideal_dcg(std::size_t n_gold, std::size_t k) {
    double s = 0.0;
    for (std::size_t l = 0; l < std::min(k, n_gold); ++l) s += discount(l);
    return s;
}

template <class PerExample>
double mean_over_nonempty(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k,
                          PerExample per) {
    check_shapes(preds.size(), gold.size(), k);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (gold[i].empty()) continue;
        sum += per(preds[i], gold[i], k);
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

double prop_of(std::span<const double> inv_prop, LabelId label) {
    if (label >= inv_prop.size())
        throw std::invalid_argument("no propensity for label " + std::to_string(label));
    return inv_prop[label];
}

// Gold propensities sorted high to low.
std::vector<double> sorted_gold_props(const LabelSet& gold, std::span<const double> inv_prop) {
    std::vector<double> w;
    w.reserve(gold.size());
    for (LabelId g : gold) w.push_back(prop_of(inv_prop, g));
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
}

} // namespace

double precision_at_k(const Ranking& pred, const LabelSet& gold, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    std::size_t hits = 0;
    for (std::size_t l = 0; l < std::min(k, pred.size()); ++l) hits += in_gold(gold, pred[l].label);
    return static_cast<double>(hits) / static_cast<double>(k);
}

double ndcg_at_k(const Ranking& pred, const LabelSet& gold, std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (gold.empty()) return 0.0;
    double dcg = 0.0;
    for (std::size_t l = 0; l < std::min(k, pred.size()); ++l)
        if (in_gold(gold, pred[l].label)) dcg += discount(l);
    return dcg / ideal_dcg(gold.size(), k);
}

double precision_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k) {
    return mean_over_nonempty(preds, gold, k,
                              [](const Ranking& p, const LabelSet& g, std::size_t kk) { return precision_at_k(p, g, kk); });
}

double ndcg_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k) {
    return mean_over_nonempty(preds, gold, k,
                              [](const Ranking& p, const LabelSet& g, std::size_t kk) { return ndcg_at_k(p, g, kk); });
}

std::size_t count_empty_gold(std::span<const LabelSet> gold) noexcept {
    return static_cast<std::size_t>(std::count_if(gold.begin(), gold.end(), [](const LabelSet& g) { return g.empty(); }));
}

std::vector<double> inverse_propensities(std::span<const std::size_t> label_counts, std::size_t n,
                                         PropensityParams params) {
    const double ln_n = std::log(static_cast<double>(n));
    if (!(ln_n > 1.0)) throw std::invalid_argument("propensity model needs more than e training examples");
    const double c = (ln_n - 1.0) * std::pow(params.b + 1.0, params.a);
    std::vector<double> out;
    out.reserve(label_counts.size());
    for (std::size_t count : label_counts)
        out.push_back(1.0 + c * std::exp(-params.a * std::log(static_cast<double>(count) + params.b)));
    return out;
}

std::vector<std::size_t> label_counts(const Dataset& data) {
    std::vector<std::size_t> counts(data.num_labels, 0);
    for (const auto& ex : data.examples)
        for (LabelId k : ex.labels) ++counts.at(k);
    return counts;
}

std::vector<double> read_propensities(std::istream& in) {
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        double v = 0.0;
        auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(v) || v < 1.0)
            throw std::invalid_argument("invalid inverse propensity '" + token + "' (must be a number >= 1)");
        out.push_back(v);
    }
    return out;
}

std::vector<double> load_propensities(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_propensities(in);
}

double psp_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k,
                std::span<const double> inv_prop) {
    check_shapes(preds.size(), gold.size(), k);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (gold[i].empty()) continue;
        for (std::size_t l = 0; l < std::min(k, preds[i].size()); ++l)
            if (in_gold(gold[i], preds[i][l].label)) num += prop_of(inv_prop, preds[i][l].label);
        const auto w = sorted_gold_props(gold[i], inv_prop);
        for (std::size_t l = 0; l < std::min(k, w.size()); ++l) den += w[l];
    }
    return den > 0.0 ? num / den : 0.0;
}

double psn_at_k(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::size_t k,
                std::span<const double> inv_prop) {
    check_shapes(preds.size(), gold.size(), k);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (gold[i].empty()) continue;
        const double idcg = ideal_dcg(gold[i].size(), k);
        double dcg = 0.0;
        for (std::size_t l = 0; l < std::min(k, preds[i].size()); ++l)
            if (in_gold(gold[i], preds[i][l].label)) dcg += prop_of(inv_prop, preds[i][l].label) * discount(l);
        const auto w = sorted_gold_props(gold[i], inv_prop);
        double best = 0.0;
        for (std::size_t l = 0; l < std::min(k, w.size()); ++l) best += w[l] * discount(l);
        num += dcg / idcg;
        den += best / idcg;
    }
    return den > 0.0 ? num / den : 0.0;
}

double EvalReport::get(const std::string& metric, std::size_t k) const noexcept {
    for (const auto& v : values)
        if (v.metric == metric && v.k == k) return v.value;
    return std::numeric_limits<double>::quiet_NaN();
}

EvalReport evaluate(std::span<const Ranking> preds, std::span<const LabelSet> gold, std::span<const std::size_t> ks,
                    std::span<const double> inv_prop) {
    EvalReport report;
    report.examples = preds.size();
    report.empty_gold = count_empty_gold(gold);
    for (std::size_t k : ks) report.values.push_back({"P", k, precision_at_k(preds, gold, k)});
    for (std::size_t k : ks) report.values.push_back({"nDCG", k, ndcg_at_k(preds, gold, k)});
    if (!inv_prop.empty()) {
        for (std::size_t k : ks) report.values.push_back({"PSP", k, psp_at_k(preds, gold, k, inv_prop)});
        for (std::size_t k : ks) report.values.push_back({"PSN", k, psn_at_k(preds, gold, k, inv_prop)});
    }
    return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "metric,k,value\n";
    char buf[64];
    for (const auto& v : report.values) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v.value);
        (void)ec;
        out << v.metric << ',' << v.k << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
    }
}

std::vector<LabelSet> gold_labels(const Dataset& data) {
    std::vector<LabelSet> out;
    out.reserve(data.size());
    for (const auto& ex : data.examples) out.push_back(ex.labels);
    return out;
}

void write_predictions(std::ostream& out, std::span<const Ranking> preds) {
    char buf[64];
    for (const auto& p : preds) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), p[i].score);
            (void)ec;
            if (i) out << ' ';
            out << p[i].label << ':' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
}

void save_predictions(const std::string& path, std::span<const Ranking> preds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_predictions(out, preds);
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<Ranking> read_predictions(std::istream& in) {
    std::vector<Ranking> out;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        Ranking r;
        std::istringstream tokens(text);
        std::string tok;
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw ParseError(line, "expected label:score, got '" + tok + "'");
            ScoredLabel s{};
            const char* b = tok.data();
            auto r1 = std::from_chars(b, b + colon, s.label);
            auto r2 = std::from_chars(b + colon + 1, b + tok.size(), s.score);
            if (r1.ec != std::errc() || r1.ptr != b + colon || r2.ec != std::errc() || r2.ptr != b + tok.size() ||
                !std::isfinite(s.score))
                throw ParseError(line, "invalid prediction '" + tok + "'");
            if (!r.empty() && s.score > r.back().score)
                throw ParseError(line, "scores must be non-increasing");
            for (const auto& prev : r)
                if (prev.label == s.label) throw ParseError(line, "label " + std::to_string(s.label) + " repeated");
            r.push_back(s);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Ranking> load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_predictions(in);
}

} // namespace ldsm
