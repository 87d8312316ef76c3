// Copyright 2026 The qgrad developers

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file grid.hpp
 * Symmetric dyadic sample grids. A register of n qubits indexes the 2^n
 * labels x_j = j/2^n - 1/2 + 2^(-n-1), the odd multiples of 2^(-n-1) inside
 * (-1/2, 1/2). A d-register grid spans the d-fold product, and a GridSpec
 * places it in problem space as y + r*x.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qgrad/errors.hpp"

namespace qgrad::grid {

/// Dense simulation guard: at most 2^26 amplitudes.
inline constexpr int kMaxTotalQubits = 26;
/// Guard for materializing full tables (points, distributions).
inline constexpr int kMaxTabulateQubits = 22;

/// Number of labels per register.
inline std::int64_t register_size(int n) { return std::int64_t{1} << n; }

/// Label of index j in the n-qubit register grid. Exact in double.
double label(int n, std::int64_t j);

/// All 2^n labels in index order (ascending).
std::vector<double> labels(int n);

/// Index of the label nearest to value; ties resolve to the smaller index.
/// value must lie in [-1/2, 1/2].
std::int64_t nearest_index(int n, double value);

/**
 * @brief Placement of a d-register grid in problem space.
 *
 * Evaluation points are y + r * x componentwise, where x ranges over the
 * label product. Flat indices are register-major: register 0 occupies the
 * most significant qubit block.
 */
struct GridSpec {
    int n = 1;
    int d = 1;
    double r = 1.0;
    std::vector<double> y; // size d

    void validate() const;
    std::uint64_t point_count() const { return std::uint64_t{1} << (n * d); }

    std::string to_json() const;
    static GridSpec from_json(const std::string &text);
};

using PointVisitor = std::function<void(
    std::uint64_t flat, std::span<const double> label_vec,
    std::span<const double> point)>;

/// Streams every grid point in flat-index order. Guarded by kMaxTotalQubits.
void for_each_point(const GridSpec &spec, const PointVisitor &visit);

/// Materializes all evaluation points. Guarded by kMaxTabulateQubits.
std::vector<std::vector<double>> evaluation_points(const GridSpec &spec);

/// Label vector for a flat index (register-major decode).
std::vector<double> labels_of_flat(const GridSpec &spec, std::uint64_t flat);

} // namespace qgrad::grid
