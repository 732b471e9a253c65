/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldsm/random.hpp"
#include "ldsm/sparse.hpp"

namespace ldsm {

enum class OptimizerKind : std::uint8_t { sgd = 0, nag = 1 };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::nag;
    double step_size = 0.1;
    double momentum = 0.9; // NAG only
};

/// Throws std::invalid_argument unless step_size is in (0, 1] and momentum in
/// [0, 1). A zero step size is accepted by train_step() but rejected here.
void check_optimizer(const OptimizerConfig& cfg);

/// Logistic function, clamped so the result is strictly inside (0, 1).
double sigmoid(double z) noexcept;

/// Binary linear classifier over `dim` features plus a bias at slot `dim`,
/// trained online with cross-entropy loss.
///
/// NAG updates are lazy: coordinates absent from an example are not touched,
/// their pending momentum steps are replayed in closed form the next time the
/// coordinate is read or updated. weight(i) and margin() always see the fully
/// caught-up values; weights() is only exact after settle().
class LinearRegressor {
public:
    LinearRegressor() = default;
    explicit LinearRegressor(std::size_t dim);
    explicit LinearRegressor(std::vector<double> weights);

    /// Weights uniform in [-scale, scale], bias included.
    static LinearRegressor random(std::size_t dim, Rng& rng, double scale = 0.01);

    std::size_t dim() const noexcept { return weights_.empty() ? 0 : weights_.size() - 1; }

    /// Effective weight of coordinate i (i == dim() is the bias).
    double weight(std::size_t i) const noexcept;
    double velocity(std::size_t i) const noexcept;

    /// Stored weights; equal to the effective ones once settled.
    std::span<const double> weights() const noexcept { return weights_; }
    bool settled() const noexcept { return stamps_.empty(); }

    /// w . x + bias.
    double score(const SparseVector& x) const noexcept;
    /// sigmoid(score(x)).
    double margin(const SparseVector& x) const noexcept { return sigmoid(score(x)); }

    /// One step of binary cross-entropy descent towards target (0 or 1).
    void train_step(const SparseVector& x, int target, const OptimizerConfig& cfg);

    /// Applies all pending momentum and drops the optimiser state.
    void settle();

private:
    void catch_up(std::size_t i) noexcept;
    double lookahead(std::size_t i) const noexcept { return weights_[i] + momentum_ * velocity_[i]; }

    std::vector<double> weights_;
    std::vector<double> velocity_;     // empty until the first NAG step
    std::vector<std::uint32_t> stamps_; // step at which each coordinate was last brought current
    std::uint32_t clock_ = 0;
    double momentum_ = 0.0;
};

inline double predict_margin(const LinearRegressor& reg, const SparseVector& x) noexcept { return reg.margin(x); }

inline void train_step(LinearRegressor& reg, const SparseVector& x, int target, const OptimizerConfig& cfg) {
    reg.train_step(x, target, cfg);
}

/// -[t ln p + (1 - t) ln(1 - p)] with p = sigmoid(w . x + b), evaluated in a
/// numerically stable form.
double bce_loss(std::span<const double> weights, const SparseVector& x, int target) noexcept;

/// Dense gradient of bce_loss with respect to the weights: (p - t) * [x, 1].
std::vector<double> bce_gradient(std::span<const double> weights, const SparseVector& x, int target);

} // namespace ldsm
