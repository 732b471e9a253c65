/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ldsm/tree.hpp"

namespace ldsm {

/// Independently seeded trees over the same data. Tree i was grown with
/// seed base_seed + i; everything else in params is shared.
struct Ensemble {
    std::vector<Tree> trees;
    TreeParams params;
    std::uint64_t base_seed = 1;

    std::size_t size() const noexcept { return trees.size(); }
    bool empty() const noexcept { return trees.empty(); }
};

/// Trains n_trees trees on up to `threads` worker threads (0 picks the
/// hardware concurrency). The result does not depend on the thread count.
Ensemble train_ensemble(const Dataset& data, const TreeParams& params, std::size_t n_trees,
                        std::uint64_t base_seed, std::size_t threads = 1);

/// Sums the per-tree normalised leaf histograms and keeps the top r labels.
std::vector<ScoredLabel> predict_ensemble(const Ensemble& ensemble, const SparseVector& x, std::size_t r);

/// Predicts every example of `data`, parallel over examples.
std::vector<std::vector<ScoredLabel>> predict_all(const Ensemble& ensemble, const Dataset& data, std::size_t r,
                                                  std::size_t threads = 1);

/// FNV-1a hash over the shared hyper-parameters. Stored in model files to
/// catch trees that were trained under different settings.
std::uint64_t params_hash(const TreeParams& params) noexcept;

/// Runs fn(i) for i in [0, n) on up to `threads` threads, rethrowing the
/// first exception after all workers have stopped.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn);

} // namespace ldsm

#include "ldsm/detail/parallel.hpp"
