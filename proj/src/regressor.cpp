/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ldsm/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldsm {

void check_optimizer(const OptimizerConfig& cfg) {
    if (!(cfg.step_size > 0.0 && cfg.step_size <= 1.0))
        throw std::invalid_argument("step size must be in (0, 1]");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
}

double sigmoid(double z) noexcept {
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - 0x1.0p-53;
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return p < lo ? lo : (p > hi ? hi : p);
}

LinearRegressor::LinearRegressor(std::size_t dim) : weights_(dim + 1, 0.0) {}

LinearRegressor::LinearRegressor(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("regressor needs at least the bias weight");
}

LinearRegressor LinearRegressor::random(std::size_t dim, Rng& rng, double scale) {
    std::vector<double> w(dim + 1);
    for (auto& v : w) v = rng.uniform(-scale, scale);
    return LinearRegressor(std::move(w));
}

double LinearRegressor::weight(std::size_t i) const noexcept {
    if (stamps_.empty() || velocity_.empty()) return weights_[i];
    const std::uint32_t k = clock_ - stamps_[i];
    if (k == 0) return weights_[i];
    // k zero-gradient momentum steps add v * (mu + mu^2 + ... + mu^k).
    const double mu = momentum_;
    const double geometric = mu * (1.0 - std::pow(mu, static_cast<double>(k))) / (1.0 - mu);
    return weights_[i] + velocity_[i] * geometric;
}

double LinearRegressor::velocity(std::size_t i) const noexcept {
    if (velocity_.empty()) return 0.0;
    if (stamps_.empty()) return velocity_[i];
    return velocity_[i] * std::pow(momentum_, static_cast<double>(clock_ - stamps_[i]));
}

void LinearRegressor::catch_up(std::size_t i) noexcept {
    const std::uint32_t k = clock_ - stamps_[i];
    if (k == 0) return;
    const double mu = momentum_;
    const double decay = std::pow(mu, static_cast<double>(k));
    weights_[i] += velocity_[i] * mu * (1.0 - decay) / (1.0 - mu);
    velocity_[i] *= decay;
    stamps_[i] = clock_;
}

double LinearRegressor::score(const SparseVector& x) const noexcept {
    const std::size_t bias = dim();
    if (stamps_.empty()) return dot(x, weights_);
    double s = weight(bias);
    for (const auto& e : x) s += e.value * weight(e.index);
    return s;
}

void LinearRegressor::train_step(const SparseVector& x, int target, const OptimizerConfig& cfg) {
    const std::size_t bias = dim();
    const double t = target ? 1.0 : 0.0;
    const double eta = cfg.step_size;

    if (cfg.kind == OptimizerKind::sgd) {
        const double g = margin(x) - t;
        for (const auto& e : x) weights_[e.index] -= eta * g * e.value;
        weights_[bias] -= eta * g;
        return;
    }

    if (velocity_.empty()) {
        velocity_.assign(weights_.size(), 0.0);
        stamps_.assign(weights_.size(), 0);
        clock_ = 0;
        momentum_ = cfg.momentum;
    }
    for (const auto& e : x) catch_up(e.index);
    catch_up(bias);

    // Gradient at the look-ahead point w + mu * v.
    double z = lookahead(bias);
    for (const auto& e : x) z += e.value * lookahead(e.index);
    const double g = sigmoid(z) - t;

    const double mu = momentum_;
    for (const auto& e : x) {
        double& v = velocity_[e.index];
        v = mu * v - eta * g * e.value;
        weights_[e.index] += v;
    }
    velocity_[bias] = mu * velocity_[bias] - eta * g;
    weights_[bias] += velocity_[bias];

    ++clock_;
    for (const auto& e : x) stamps_[e.index] = clock_;
    stamps_[bias] = clock_;
}

void LinearRegressor::settle() {
    if (!stamps_.empty()) {
        for (std::size_t i = 0; i < weights_.size(); ++i) catch_up(i);
    }
    stamps_.clear();
    stamps_.shrink_to_fit();
    velocity_.clear();
    velocity_.shrink_to_fit();
    clock_ = 0;
}

double bce_loss(std::span<const double> weights, const SparseVector& x, int target) noexcept {
    const double z = dot(x, weights);
    // softplus(z) - t * z
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    return softplus - (target ? z : 0.0);
}

std::vector<double> bce_gradient(std::span<const double> weights, const SparseVector& x, int target) {
    std::vector<double> g(weights.size(), 0.0);
    const double residual = sigmoid(dot(x, weights)) - (target ? 1.0 : 0.0);
    for (const auto& e : x) g[e.index] = residual * e.value;
    g.back() = residual;
    return g;
}

} // namespace ldsm
