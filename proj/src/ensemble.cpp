/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/ensemble.hpp"

#include <bit>
#include <optional>
#include <stdexcept>

namespace ldsm {

Ensemble train_ensemble(const Dataset& data, const TreeParams& params, std::size_t n_trees,
                        std::uint64_t base_seed, std::size_t threads) {
    if (n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
    check_tree_params(params);

    std::vector<std::optional<Tree>> slots(n_trees);
    parallel_for(n_trees, threads, [&](std::size_t i) {
        TreeParams p = params;
        p.seed = base_seed + i;
        slots[i].emplace(build_tree(data, p));
    });

    Ensemble out;
    out.params = params;
    out.params.seed = base_seed;
    out.base_seed = base_seed;
    out.trees.reserve(n_trees);
    for (auto& t : slots) out.trees.push_back(std::move(*t));
    return out;
}

std::vector<ScoredLabel> predict_ensemble(const Ensemble& ensemble, const SparseVector& x, std::size_t r) {
    if (ensemble.empty()) throw std::invalid_argument("ensemble has no trees");
    LabelScores scores;
    for (const auto& tree : ensemble.trees) tree.accumulate(x, scores);
    return scores.top(r);
}

std::vector<std::vector<ScoredLabel>> predict_all(const Ensemble& ensemble, const Dataset& data, std::size_t r,
                                                  std::size_t threads) {
    std::vector<std::vector<ScoredLabel>> out(data.size());
    parallel_for(data.size(), threads,
                 [&](std::size_t i) { out[i] = predict_ensemble(ensemble, data.examples[i].features, r); });
    return out;
}

namespace {

struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ull;

    void bytes(const void* p, std::size_t n) noexcept {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ull;
        }
    }
    void u64(std::uint64_t v) noexcept {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 8);
    }
    void f64(double v) noexcept { u64(std::bit_cast<std::uint64_t>(v)); }
};

} // namespace

std::uint64_t params_hash(const TreeParams& params) noexcept {
    Fnv1a f;
    f.u64(static_cast<std::uint64_t>(params.arity));
    f.u64(params.max_nodes);
    f.u64(static_cast<std::uint64_t>(params.epochs));
    f.f64(params.lambda1);
    f.f64(params.lambda2);
    f.u64(static_cast<std::uint64_t>(params.optimizer.kind));
    f.f64(params.optimizer.step_size);
    f.f64(params.optimizer.momentum);
    f.u64(params.min_split_examples);
    return f.h;
}

} // namespace ldsm
