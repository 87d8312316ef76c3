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
 * @file gradient.hpp
 * Phase-kickback gradient estimation. A function is encoded as a diagonal
 * phase over a symmetric dyadic grid, an inverse grid Fourier transform per
 * register concentrates the outcome distribution near the gradient, and a
 * coordinatewise median over repetitions drives the failure probability
 * down. The smooth pipeline composes this with a high-degree central
 * difference so that one phase application already carries an affine
 * approximation of the target around the expansion point.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qgrad/errors.hpp"
#include "qgrad/oracles.hpp"
#include "qgrad/stencil.hpp"

namespace qgrad::grad {

/// Scalar target evaluated at a point in problem space.
using PointFn = std::function<double(std::span<const double>)>;

/// Phase in radians as a function of a grid label vector.
using LabelPhaseFn = std::function<double(std::span<const double>)>;

/**
 * @brief Derived run parameters for one gradient job.
 *
 * The fields satisfy n = n_eps + n_M with n_eps = ceil(log2(4/(r*eps))) and
 * n_M = ceil(log2(3*r*M_g)); the smooth pipeline additionally fixes
 * m = ceil(log2(c*sqrt(d)/eps)) and
 * 1/r = 9*c*m*sqrt(d) * (81*8*42*pi*c*m*sqrt(d)/eps)^(1/(2m)),
 * adjusting m downward or upward when the qubit budget n*d would overflow.
 */
struct GradientParameters {
    int d = 1;
    double eps = 0.0;
    double rho = 0.0;
    double c = 0.0;   // derivative growth scale; 0 disables tail checking
    double M_g = 0.0; // bound on the gradient sup norm

    int m = 1;      // central-difference half order
    double r = 0.0; // grid scale in problem space
    int n_eps = 0;  // accuracy qubits
    int n_M = 0;    // range qubits (may be negative)
    int n = 0;      // qubits per register, n_eps + n_M
    double S = 0.0; // phase multiplier 2*pi*2^n_eps

    int repetitions = 1; // ceil(12 * ln(d/rho))
    bool adjusted_m = false;
    std::uint64_t units_per_invocation = 0; // sum_l ceil(|a_l| * S)

    /// Outcome rescale factor 2^n_M / r mapping labels to gradient space.
    double outcome_scale() const;
};

/**
 * @brief Chooses (m, r, n_eps, n_M, n, S, repetitions) for a smooth target.
 *
 * M_g <= 0 defaults the gradient bound to c. When enforce_guard is set and
 * the derived register width would exceed the dense-simulation budget, the
 * half order m is rescanned over 1..m+10 and the feasible candidate with
 * the fewest phase units per invocation is taken (ResourceError when none
 * fits). With enforce_guard false the formula values are returned as-is,
 * which is useful for pure cost accounting.
 *
 * Errors: DomainError for nonsensical d/eps/rho/c; ConfigError when
 * eps > c or eps >= M_g (premises of the accuracy guarantee).
 */
GradientParameters select_parameters(int d, double eps, double rho, double c,
                                     double M_g = 0.0,
                                     bool enforce_guard = true);

/// Phase units charged by one invocation of the degree-2m product at
/// multiplier S: sum over l != 0 of ceil(|a_l| * S).
std::uint64_t invocation_units(int m, double S);

/// ceil(12 * ln(d / rho)), at least 1.
int repetition_count(int d, double rho);

/**
 * @brief One round of the core routine on d registers of n qubits.
 *
 * Prepares the uniform superposition, applies the diagonal phase
 * phase_fn(x) (already scaled: an affine phase 2*pi*2^n*(g.x + c0) makes
 * the outcome concentrate at g), inverse grid Fourier transforms each
 * register, and measures. Returns the measured label vector.
 */
std::vector<double> jordan_core(const LabelPhaseFn &phase_fn, int d, int n,
                                std::mt19937_64 &rng);

/// Exact outcome distribution of one round, by flat grid index.
std::vector<double> jordan_output_distribution(const LabelPhaseFn &phase_fn,
                                               int d, int n);

/**
 * @brief A diagonal phase oracle bundled with its own cost model.
 *
 * phase maps a grid label vector to radians. charge_invocation records one
 * logical application on the ledger (for a plain oracle one unit query; for
 * a central-difference product the per-leg fractional charges).
 */
struct ScaledOracle {
    LabelPhaseFn phase;
    std::function<void()> charge_invocation;
    std::uint64_t units_per_invocation = 1;
};

/// Result of a gradient job, serializable for the harness.
struct GradientReport {
    std::vector<double> estimate;
    std::vector<std::vector<double>> raw; // repetitions x d
    int repetitions = 0;
    std::uint64_t phase_query_units = 0; // accrued by this job
    std::uint64_t probability_queries = 0;
    GradientParameters params;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> truth;
    std::optional<double> err_inf;

    std::string to_json() const;
};

/**
 * @brief Runs the core routine repeatedly and medians coordinatewise.
 *
 * oracle.phase must realize x -> 2*pi*2^n_eps * f(y + r*x) for the target
 * whose rescaled slope obeys the grid premises; outcomes are rescaled by
 * 2^n_M / r. The final state is prepared once and measured repetitions
 * times (identically distributed draws); the ledger is charged once per
 * repetition. Medians of even counts take the lower middle.
 */
GradientReport estimate_gradient_affine(
    const ScaledOracle &oracle, const GradientParameters &params,
    std::uint64_t seed, oracles::Ledger ledger = nullptr,
    const std::vector<double> *truth = nullptr);

/**
 * @brief Degree-2m central-difference gradient of f around y.
 *
 * Builds the product oracle with combined diagonal phase
 * S * sum_l a_l f(y + r*l*x) (the fractional factors commute, so one
 * diagonal application is exact) while charging ceil(|a_l|*S) units per leg
 * per repetition, then runs estimate_gradient_affine.
 *
 * Errors: ConfigError when params.c > 0 and the analytic tail bound
 * diverges at this r (choose a smaller r).
 */
GradientReport gradient_via_central_difference(
    const PointFn &f, std::span<const double> y,
    const GradientParameters &params, std::uint64_t seed,
    oracles::Ledger ledger = nullptr,
    const std::vector<double> *truth = nullptr);

/**
 * @brief End-to-end pipeline for targets with |d^k f| <= c^k k^(k/2).
 *
 * Selects parameters via select_parameters(d, eps, rho, c, M_g) and
 * delegates to gradient_via_central_difference. The per-invocation phase
 * units are asserted against the closed-form budget
 * 2m + S*(2 ln m + 2).
 */
GradientReport estimate_gradient_smooth(const PointFn &f,
                                        std::span<const double> y, int d,
                                        double eps, double rho, double c,
                                        std::uint64_t seed,
                                        oracles::Ledger ledger = nullptr,
                                        const std::vector<double> *truth = nullptr,
                                        double M_g = 0.0);

} // namespace qgrad::grad
