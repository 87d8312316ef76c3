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
 * @file harness.hpp
 * Baseline estimators and scaling experiments.
 *
 * Three reference cost models bracket the phase-kickback pipeline: direct
 * Bernoulli sampling with a forward difference, a semiclassical model that
 * prices amplitude estimation per stencil evaluation, and the first-order
 * kickback with grid scale eps/sqrt(d). run_scaling_experiment sweeps
 * methods over (d, eps) cells, seeds each cell independently, and emits
 * append-only CSV records whose query costs come straight from the
 * respective ledgers.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qgrad/errors.hpp"
#include "qgrad/gradient.hpp"

namespace qgrad::harness {

/**
 * @brief Named objective with everything the estimators need.
 *
 * probability shifts the value into [0,1]; probability_scale restores the
 * value gradient from the probability gradient. c is the derivative growth
 * scale for the smooth pipeline, slope_cap a bound on |df/dx_i|.
 */
struct Target {
    std::string name;
    grad::PointFn value;
    grad::PointFn probability;
    double probability_scale = 2.0;
    std::function<std::vector<double>(std::span<const double>)> gradient;
    double c = 1.0;
    double slope_cap = 1.0;
};

/// Registry lookup; currently "sin-sum" (f = sin of the coordinate sum).
const Target &target_by_name(const std::string &name);

/**
 * @brief Forward-difference gradient from Bernoulli samples of p.
 *
 * Estimates p at x and at x + delta_step e_i from ceil(4/eps^2) samples
 * each, so the count is exactly (d+1) ceil(4/eps^2).
 */
struct ClassicalSamplingResult {
    std::vector<double> estimate; // gradient of p itself
    std::uint64_t samples_per_point = 0;
    std::uint64_t total_samples = 0;
};

ClassicalSamplingResult classical_gradient_sampling(
    const grad::PointFn &p, std::span<const double> x, double eps,
    double delta_step, std::uint64_t seed);

/**
 * @brief Stencil gradient under an amplitude-estimation cost model.
 *
 * Each evaluation returns truth plus uniform noise in [-eps', eps'] and is
 * priced at ceil(pi/eps') queries. The displacement solves
 * exp(-m/2) delta^(2m) = eps/(2B) so the truncation spends half the error
 * budget, and eps' = eps delta / (2 sum|a_l|) spends the other half.
 * Total cost d * 2m * ceil(pi/eps').
 */
struct SemiclassicalResult {
    std::vector<double> estimate;
    int m = 0;
    double delta = 0.0;
    double eps_prime = 0.0;
    std::uint64_t queries_per_eval = 0;
    std::uint64_t query_cost = 0;
};

SemiclassicalResult semiclassical_gradient(const grad::PointFn &f,
                                           std::span<const double> x,
                                           double eps, int m,
                                           std::uint64_t seed,
                                           double B = 1.0);

/**
 * @brief First-order kickback parameters: m = 1, grid scale eps/sqrt(d).
 *
 * The phase stretch then grows like sqrt(d)/eps^2, reproducing the
 * quadratic cost trend of the plain one-shot method. ResourceError when
 * the registers exceed the dense budget.
 */
grad::GradientParameters jordan_original_parameters(int d, double eps,
                                                    double rho,
                                                    double slope_cap = 1.0);

/// Runs the m = 1 pipeline with jordan_original_parameters.
grad::GradientReport jordan_original_gradient(
    const grad::PointFn &f, std::span<const double> x, double eps, double rho,
    std::uint64_t seed, oracles::Ledger ledger = nullptr,
    const std::vector<double> *truth = nullptr);

/**
 * @brief Pipeline parameters at a caller-fixed difference order.
 *
 * Uses the same grid-scale and register formulas as the adaptive
 * selection but pins m; tail checking is disabled (the fixed-order model
 * is meant for targets whose remainder vanishes).
 */
grad::GradientParameters fixed_order_parameters(int d, double eps, double rho,
                                                int m, double c,
                                                double slope_cap);

/**
 * @brief One sweep cell: method at (d, eps) with per-cell seed.
 */
struct ExperimentRecord {
    std::string method;
    int d = 0;
    double eps = 0.0;
    double err_inf = 0.0;
    std::uint64_t query_cost = 0;
    int repetitions = 0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::string status = "ok";
};

struct ExperimentConfig {
    std::vector<std::string> methods;
    std::vector<int> d_values;
    std::vector<double> eps_values;
    int trials = 1;
    std::uint64_t seed = 20260312;
    double rho = 1.0 / 3.0;
    std::string target = "sin-sum";
    bool measure_wall_clock = false; // omitted (0) by default for
                                     // byte-identical reruns

    static ExperimentConfig from_json(const std::string &text);
    std::string to_json() const;
    void validate() const;
};

/// Known method names: classical-sampling, semi-classical,
/// jordan-original, improved-smooth, improved-polynomial.
const std::vector<std::string> &known_methods();

/**
 * @brief Runs every (method, d, eps, trial) cell in listed order.
 *
 * Each cell derives its seed from the config seed and the cell labels,
 * runs against the target at the origin, and records the max-norm error
 * against the analytic gradient plus the ledger cost. Cells that trip
 * the resource guard are recorded with a skip status instead of failing
 * the sweep.
 */
std::vector<ExperimentRecord> run_scaling_experiment(
    const ExperimentConfig &config);

/// CSV with header method,d,eps,err_inf,query_cost,repetitions,seed,
/// wall_ms,status. Deterministic formatting.
std::string to_csv(const std::vector<ExperimentRecord> &records);

/// Least-squares slope of log(y) against log(x); inputs must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace qgrad::harness
