/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>

#include "ldsm/sparse.hpp"

namespace ldsm {

/// n_examples examples cycling through n_classes single-label classes. Class c
/// owns features [c * block, (c + 1) * block), all set to 1 / sqrt(block), so
/// classes are orthogonal and linearly separable.
Dataset make_orthogonal_classes(std::size_t n_classes, std::size_t n_examples, std::size_t block = 1);

struct RandomMultilabelOptions {
    std::size_t num_examples = 500;
    std::size_t num_features = 200;
    std::size_t num_labels = 30;
    std::size_t max_labels = 3;      // per example, at least 1
    std::size_t prototype_size = 8;  // features tied to each label
    double keep = 0.7;               // chance a prototype feature shows up
    std::size_t noise_features = 3;  // uniformly random extra features
    double label_skew = 1.0;         // power-law exponent over label ranks
};

/// Labels drawn from a power law; features come from per-label prototypes
/// plus noise, L2-normalised. Deterministic in seed.
Dataset make_random_multilabel(const RandomMultilabelOptions& opts, std::uint64_t seed);

} // namespace ldsm
