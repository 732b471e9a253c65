/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ldsm {

using FeatureIndex = std::uint32_t;
using LabelId = std::uint32_t;

struct FeatureEntry {
    FeatureIndex index;
    double value;

    friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

/// Index/value pairs with strictly increasing indices.
class SparseVector {
public:
    SparseVector() = default;

    /// Throws std::invalid_argument unless indices are strictly increasing.
    explicit SparseVector(std::vector<FeatureEntry> entries);

    std::span<const FeatureEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }
    const FeatureEntry& operator[](std::size_t i) const { return entries_[i]; }

    /// Largest index + 1, or 0 when empty.
    std::size_t extent() const noexcept { return entries_.empty() ? 0 : entries_.back().index + 1; }

    double squared_norm() const noexcept;
    void scale(double factor) noexcept;

    // Scratch-buffer interface. The caller keeps indices increasing.
    void clear() noexcept { entries_.clear(); }
    void reserve(std::size_t n) { entries_.reserve(n); }
    void append(FeatureIndex index, double value) { entries_.push_back({index, value}); }

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::vector<FeatureEntry> entries_;
};

struct Example {
    SparseVector features;
    std::vector<LabelId> labels; // sorted, unique
};

struct Dataset {
    std::vector<Example> examples;
    std::size_t num_features = 0;
    std::size_t num_labels = 0;
    /// Repeated label ids dropped while parsing.
    std::size_t duplicate_labels_dropped = 0;

    std::size_t size() const noexcept { return examples.size(); }
    bool empty() const noexcept { return examples.empty(); }
};

/// Reads the extreme-classification text format:
///
///     N D K
///     l1,l2,...,lm f1:v1 f2:v2 ...
///
/// Indices are 0-based. A line starting with whitespace has no labels. CRLF
/// line endings are accepted. Errors are reported as ParseError with the
/// offending line number.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

/// Writes the same format; values use round-trip precision.
void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::string& path, const Dataset& data);

/// Scales each example's features to unit L2 norm. Zero vectors are left alone.
void normalize_l2(Dataset& data) noexcept;

/// Sum of x[i] * w[i] plus the bias stored in w.back(). Every index of x must
/// be < w.size() - 1.
double dot(const SparseVector& x, std::span<const double> w) noexcept;

} // namespace ldsm
