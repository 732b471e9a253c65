/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ldsm/error.hpp"
#include "ldsm/metrics.hpp"
#include "ldsm/random.hpp"

using namespace ldsm;

namespace {

Ranking ranking(std::initializer_list<LabelId> labels) {
    Ranking r;
    double s = 1.0;
    for (LabelId l : labels) {
        r.push_back({l, s});
        s /= 2.0;
    }
    return r;
}

struct Instance {
    std::vector<Ranking> preds;
    std::vector<LabelSet> gold;
    std::vector<double> inv_prop;
};

Instance random_instance(Rng& rng, std::size_t n_labels) {
    Instance inst;
    const std::size_t n = 1 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) {
        LabelSet g;
        for (LabelId l = 0; l < n_labels; ++l)
            if (rng.bernoulli(0.3)) g.push_back(l);
        if (g.size() > 5) g.resize(5);
        inst.gold.push_back(g);
        std::vector<LabelId> perm(n_labels);
        for (LabelId l = 0; l < n_labels; ++l) perm[l] = l;
        for (std::size_t j = perm.size(); j > 1; --j) std::swap(perm[j - 1], perm[rng.below(j)]);
        perm.resize(rng.below(n_labels + 1));
        Ranking r;
        for (std::size_t j = 0; j < perm.size(); ++j) r.push_back({perm[j], 1.0 - 0.01 * static_cast<double>(j)});
        inst.preds.push_back(r);
    }
    for (std::size_t l = 0; l < n_labels; ++l) inst.inv_prop.push_back(rng.uniform(1.0, 6.0));
    return inst;
}

double disc(std::size_t rank0) { return 1.0 / std::log2(static_cast<double>(rank0) + 2.0); }

// Best weighted gain attainable at k, found by trying every order of gold.
double brute_best(const LabelSet& gold, const std::vector<double>& w, std::size_t k, bool discounted) {
    std::vector<LabelId> order = gold;
    double best = 0.0;
    do {
        double s = 0.0;
        for (std::size_t l = 0; l < std::min(k, order.size()); ++l) s += w[order[l]] * (discounted ? disc(l) : 1.0);
        best = std::max(best, s);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

double brute_psp(const Instance& inst, std::size_t k) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < inst.gold.size(); ++i) {
        const auto& g = inst.gold[i];
        if (g.empty()) continue;
        for (std::size_t l = 0; l < std::min(k, inst.preds[i].size()); ++l) {
            const LabelId p = inst.preds[i][l].label;
            if (std::find(g.begin(), g.end(), p) != g.end()) num += inst.inv_prop[p];
        }
        den += brute_best(g, inst.inv_prop, k, false);
    }
    return den > 0.0 ? num / den : 0.0;
}

double brute_psn(const Instance& inst, std::size_t k) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < inst.gold.size(); ++i) {
        const auto& g = inst.gold[i];
        if (g.empty()) continue;
        double idcg = 0.0;
        for (std::size_t l = 0; l < std::min(k, g.size()); ++l) idcg += disc(l);
        double dcg = 0.0;
        for (std::size_t l = 0; l < std::min(k, inst.preds[i].size()); ++l) {
            const LabelId p = inst.preds[i][l].label;
            if (std::find(g.begin(), g.end(), p) != g.end()) dcg += inst.inv_prop[p] * disc(l);
        }
        num += dcg / idcg;
        den += brute_best(g, inst.inv_prop, k, true) / idcg;
    }
    return den > 0.0 ? num / den : 0.0;
}

} // namespace

TEST_CASE("precision examples") {
    CHECK(precision_at_k(ranking({1, 4}), {1, 7}, 1) == 1.0);
    CHECK(precision_at_k(ranking({1, 3, 2}), {1, 2}, 3) == doctest::Approx(2.0 / 3.0));
    CHECK(precision_at_k(ranking({1}), {1, 2}, 3) == doctest::Approx(1.0 / 3.0)); // short prediction
    CHECK_THROWS_AS(precision_at_k(ranking({1}), {1}, 0), std::invalid_argument);
}

TEST_CASE("nDCG examples") {
    CHECK(ndcg_at_k(ranking({1, 2, 3}), {1, 2, 3}, 3) == doctest::Approx(1.0));
    const double want = (1.0 + 1.0 / std::log2(4.0)) / (1.0 + 1.0 / std::log2(3.0));
    CHECK(ndcg_at_k(ranking({1, 3, 2}), {1, 2}, 3) == doctest::Approx(want));
    CHECK(want == doctest::Approx(0.9197).epsilon(1e-4));
}

TEST_CASE("nDCG at 1 equals P at 1") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const Instance inst = random_instance(rng, 8);
        CHECK(ndcg_at_k(inst.preds, inst.gold, 1) == doctest::Approx(precision_at_k(inst.preds, inst.gold, 1)));
    }
}

TEST_CASE("empty gold sets are excluded and counted") {
    const std::vector<Ranking> preds{ranking({1}), ranking({2})};
    const std::vector<LabelSet> gold{{1}, {}};
    CHECK(precision_at_k(preds, gold, 1) == 1.0);
    CHECK(ndcg_at_k(preds, gold, 1) == 1.0);
    CHECK(count_empty_gold(gold) == 1);
    const EvalReport rep = evaluate(preds, gold, std::vector<std::size_t>{1});
    CHECK(rep.empty_gold == 1);
    CHECK(rep.examples == 2);
    CHECK_THROWS_AS(precision_at_k(preds, std::vector<LabelSet>{{1}}, 1), std::invalid_argument);
}

TEST_CASE("inverse propensity spot value") {
    const std::vector<std::size_t> counts{10};
    const double a = 0.55, b = 1.5, n = 1e4;
    const double c = (std::log(n) - 1.0) * std::pow(b + 1.0, a);
    const double want = 1.0 + c * std::pow(10.0 + b, -a);
    const auto got = inverse_propensities(counts, 10000);
    CHECK(got[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("inverse propensities are symmetric and decreasing in frequency") {
    const std::vector<std::size_t> same{5, 5, 5};
    const auto eq = inverse_propensities(same, 100);
    CHECK(eq[0] == eq[1]);
    CHECK(eq[1] == eq[2]);
    const std::vector<std::size_t> counts{0, 1, 10, 100};
    const auto w = inverse_propensities(counts, 100);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) CHECK(w[i] > w[i + 1]);
    for (double v : w) CHECK(v >= 1.0);
    CHECK_THROWS_AS(inverse_propensities(counts, 2), std::invalid_argument);
}

TEST_CASE("uniform propensities reduce to the plain metrics") {
    Rng rng(6);
    for (int t = 0; t < 100; ++t) {
        Instance inst = random_instance(rng, 6);
        std::fill(inst.inv_prop.begin(), inst.inv_prop.end(), 2.5);
        for (std::size_t k : {1u, 3u, 5u}) {
            CHECK(psn_at_k(inst.preds, inst.gold, k, inst.inv_prop) ==
                  doctest::Approx(ndcg_at_k(inst.preds, inst.gold, k)));
            // With gold sets of at least k labels PSP and P@k coincide.
            std::vector<Ranking> preds;
            std::vector<LabelSet> gold;
            for (std::size_t i = 0; i < inst.gold.size(); ++i)
                if (inst.gold[i].size() >= k) {
                    preds.push_back(inst.preds[i]);
                    gold.push_back(inst.gold[i]);
                }
            if (gold.empty()) continue;
            CHECK(psp_at_k(preds, gold, k, inst.inv_prop) == doctest::Approx(precision_at_k(preds, gold, k)));
        }
    }
}

TEST_CASE("perfect tail hit scores one") {
    const std::vector<double> w{1.1, 9.0};
    const std::vector<Ranking> preds{ranking({1})};
    const std::vector<LabelSet> gold{{1}};
    CHECK(psp_at_k(preds, gold, 1, w) == doctest::Approx(1.0));
    CHECK(psn_at_k(preds, gold, 1, w) == doctest::Approx(1.0));
}

TEST_CASE("propensity metrics match a brute-force oracle") {
    Rng rng(31);
    for (int t = 0; t < 300; ++t) {
        const Instance inst = random_instance(rng, 7);
        for (std::size_t k : {1u, 2u, 3u, 5u}) {
            const double psp = psp_at_k(inst.preds, inst.gold, k, inst.inv_prop);
            const double psn = psn_at_k(inst.preds, inst.gold, k, inst.inv_prop);
            CHECK(psp == doctest::Approx(brute_psp(inst, k)).epsilon(1e-12));
            CHECK(psn == doctest::Approx(brute_psn(inst, k)).epsilon(1e-12));
            for (double v : {psp, psn, precision_at_k(inst.preds, inst.gold, k), ndcg_at_k(inst.preds, inst.gold, k)}) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("metrics ignore monotone rescaling of scores") {
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        Instance inst = random_instance(rng, 6);
        const double p = precision_at_k(inst.preds, inst.gold, 3);
        const double n = ndcg_at_k(inst.preds, inst.gold, 3);
        for (auto& r : inst.preds)
            for (auto& s : r) s.score = std::exp(3.0 * s.score) + 7.0;
        CHECK(precision_at_k(inst.preds, inst.gold, 3) == p);
        CHECK(ndcg_at_k(inst.preds, inst.gold, 3) == n);
    }
}

TEST_CASE("evaluate orders metrics and fills propensity rows") {
    const std::vector<Ranking> preds{ranking({0, 1}), ranking({2, 0})};
    const std::vector<LabelSet> gold{{0}, {0, 2}};
    const std::vector<std::size_t> ks{1, 2};
    const std::vector<double> w{1.0, 1.0, 3.0};
    const EvalReport rep = evaluate(preds, gold, ks, w);
    REQUIRE(rep.values.size() == 8);
    CHECK(rep.values[0].metric == "P");
    CHECK(rep.values[2].metric == "nDCG");
    CHECK(rep.values[4].metric == "PSP");
    CHECK(rep.values[6].metric == "PSN");
    CHECK(rep.get("P", 1) == 1.0);
    CHECK(rep.get("P", 2) == doctest::Approx(0.75));
    CHECK(std::isnan(rep.get("P", 7)));
    std::ostringstream out;
    write_report_csv(out, rep);
    CHECK(out.str().rfind("metric,k,value\nP,1,1\n", 0) == 0);
}

TEST_CASE("prediction files round-trip and reject bad lines") {
    const std::vector<Ranking> preds{{{3, 0.75}, {1, 0.1}}, {}, {{0, 2.0}}};
    std::ostringstream out;
    write_predictions(out, preds);
    std::istringstream in(out.str());
    CHECK(read_predictions(in) == preds);

    const auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream s(text);
        try {
            read_predictions(s);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("1:0.5\n2\n") == 2);
    CHECK(line_of("1:0.5 2:0.9\n") == 1);
    CHECK(line_of("1:0.5 1:0.4\n") == 1);
    CHECK(line_of("x:1\n") == 1);
}

TEST_CASE("propensity files") {
    std::istringstream good("1 2.5\n3\n");
    CHECK(read_propensities(good) == std::vector<double>{1.0, 2.5, 3.0});
    std::istringstream low("1 0.5\n");
    CHECK_THROWS(read_propensities(low));
}
