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
 * @file bounds.hpp
 * Query lower bounds for phase-oracle algorithms. A family of Gaussian bump
 * functions is hard to distinguish from the zero function, yet identifiable
 * from an accurate gradient at the origin; the hybrid-method evaluator turns
 * value tables over a finite point set into a query lower bound.
 */

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgrad/errors.hpp"

namespace qgrad::bounds {

/**
 * @brief Hard-family member value.
 *
 * j = 0 selects the zero reference function; j in 1..d selects
 * f_j(x) = 2 * eps * x_j * exp(-c^2 ||x||^2 / 2).
 */
double hard_family_eval(int j, std::span<const double> x, double eps,
                        double c);

/// Rows j = 1..d of hard-family values over the supplied points.
std::vector<std::vector<double>> hard_family_table(
    int d, double eps, double c,
    const std::vector<std::vector<double>> &points);

/// Result of the hybrid-method evaluator.
struct HybridBound {
    double value = 0.0; // +infinity when the family matches the reference
    bool infinite = false;
    double max_sum = 0.0; // max over points of sum_f min(|f - ref|^2, 4)
};

/**
 * @brief Query lower bound from explicit value tables.
 *
 * Returns sqrt(|F|)/3 divided by the square root of the worst-case
 * accumulated (clipped) squared distance from the reference over the point
 * set. Distinguishing any family member from the reference with success
 * probability 2/3 needs at least this many oracle queries.
 */
HybridBound hybrid_lower_bound(
    const std::vector<std::vector<double>> &family_values,
    std::span<const double> reference_values);

/**
 * @brief Final gradient-computation lower bound c*sqrt(d)/(4*eps).
 *
 * Requires the premise 2*eps <= c (ConfigError otherwise).
 */
double gradient_lower_bound(double c, double eps, int d);

/**
 * @brief Exact partial derivative of a hard-family member at the origin.
 *
 * alpha lists the multiplicity per coordinate (size d >= j). prefactor <= 0
 * selects the unit-smoothness normalization f_j = c * x_j * exp(...);
 * pass 2*eps for the distinguishing family.
 */
double hard_family_derivative(int j, double c, std::span<const int> alpha,
                              double prefactor = 0.0);

/// Outcome of sweeping all derivatives up to a total order.
struct DerivativeCertificate {
    int j = 1;
    int d = 1;
    int k_max = 0;
    std::uint64_t multi_indices = 0; // enumerated
    std::uint64_t nonzero = 0;       // with nonvanishing derivative
    double worst_ratio = 0.0;        // max |deriv| / (c^k k^(k/2))
    bool gradient_matches = false;   // first derivatives = prefactor * e_j
    bool holds = false;
};

/**
 * @brief Checks |d^alpha f_j(0)| <= c^k k^(k/2) for all |alpha| <= k_max.
 *
 * Derivatives come from the closed-form Taylor factors of the Gaussian
 * product, so the sweep is exact. k_max is capped at 8. A violated bound
 * raises InternalError (it would indicate an implementation bug).
 */
DerivativeCertificate hard_family_derivative_certificate(
    int j, double c, int k_max, int d = 3, double prefactor = 0.0);

} // namespace qgrad::bounds
