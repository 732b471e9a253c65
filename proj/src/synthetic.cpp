/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ldsm/random.hpp"

namespace ldsm {

Dataset make_orthogonal_classes(std::size_t n_classes, std::size_t n_examples, std::size_t block) {
    if (n_classes == 0 || block == 0) throw std::invalid_argument("need at least one class and one feature per class");
    Dataset ds;
    ds.num_features = n_classes * block;
    ds.num_labels = n_classes;
    ds.examples.reserve(n_examples);
    const double v = 1.0 / std::sqrt(static_cast<double>(block));
    for (std::size_t i = 0; i < n_examples; ++i) {
        const std::size_t c = i % n_classes;
        Example ex;
        ex.labels = {static_cast<LabelId>(c)};
        for (std::size_t f = 0; f < block; ++f) ex.features.append(static_cast<FeatureIndex>(c * block + f), v);
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

Dataset make_random_multilabel(const RandomMultilabelOptions& opts, std::uint64_t seed) {
    if (opts.num_labels == 0 || opts.num_features == 0 || opts.max_labels == 0)
        throw std::invalid_argument("random multilabel generator needs labels, features and max_labels >= 1");
    Rng rng(seed);

    std::vector<std::vector<FeatureIndex>> prototypes(opts.num_labels);
    for (auto& proto : prototypes)
        for (std::size_t f = 0; f < opts.prototype_size; ++f)
            proto.push_back(static_cast<FeatureIndex>(rng.below(opts.num_features)));

    // Cumulative power-law weights over label ranks.
    std::vector<double> cdf(opts.num_labels);
    double total = 0.0;
    for (std::size_t l = 0; l < opts.num_labels; ++l) {
        total += std::pow(static_cast<double>(l + 1), -opts.label_skew);
        cdf[l] = total;
    }
    const auto draw_label = [&] {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        return static_cast<LabelId>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), opts.num_labels - 1));
    };

    Dataset ds;
    ds.num_features = opts.num_features;
    ds.num_labels = opts.num_labels;
    ds.examples.reserve(opts.num_examples);
    const std::size_t max_labels = std::min(opts.max_labels, opts.num_labels);
    for (std::size_t i = 0; i < opts.num_examples; ++i) {
        Example ex;
        const std::size_t n_labels = 1 + rng.below(max_labels);
        while (ex.labels.size() < n_labels) {
            const LabelId l = draw_label();
            if (std::find(ex.labels.begin(), ex.labels.end(), l) == ex.labels.end()) ex.labels.push_back(l);
        }
        std::sort(ex.labels.begin(), ex.labels.end());

        std::map<FeatureIndex, double> features;
        for (LabelId l : ex.labels)
            for (FeatureIndex f : prototypes[l])
                if (rng.bernoulli(opts.keep)) features[f] += rng.uniform(0.5, 1.5);
        for (std::size_t f = 0; f < opts.noise_features; ++f)
            features[static_cast<FeatureIndex>(rng.below(opts.num_features))] += rng.uniform(0.0, 0.5);
        for (const auto& [f, v] : features) ex.features.append(f, v);
        ds.examples.push_back(std::move(ex));
    }
    normalize_l2(ds);
    return ds;
}

} // namespace ldsm
