/*
 * Copyright (C) 2026 The ldsm authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldsm/ensemble.hpp"
#include "ldsm/tree.hpp"

namespace ldsm {

inline constexpr std::uint32_t kModelVersion = 1;

/// Width of stored regressor weights. 8 round-trips exactly; 4 halves the
/// file at the cost of float rounding.
enum class WeightWidth : std::uint8_t { f64 = 8, f32 = 4 };

/// Little-endian binary tree container; see docs/model-format.md.
std::string serialize_tree(const Tree& tree, WeightWidth width = WeightWidth::f64);
/// Throws FormatError on bad magic, unknown version, truncation or an
/// inconsistent node table.
Tree deserialize_tree(const std::string& bytes);

std::string serialize_ensemble(const Ensemble& ensemble, WeightWidth width = WeightWidth::f64);
Ensemble deserialize_ensemble(const std::string& bytes);

void save_ensemble(const std::string& path, const Ensemble& ensemble, WeightWidth width = WeightWidth::f64);
/// Throws IoError if the file cannot be read, FormatError if it is not a model.
Ensemble load_ensemble(const std::string& path);

} // namespace ldsm
