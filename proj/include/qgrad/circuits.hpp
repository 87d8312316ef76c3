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
 * @file circuits.hpp
 * Parametrized-unitary objectives and variational-eigensolver oracles.
 *
 * A tunable circuit interleaves fixed contractions with projector-gated
 * exponentials, U(x) = U0 prod_j (P_j ox e^(i x_j H_j) + (1-P_j) ox 1) U_j.
 * Partial derivatives in the parameters are exact: each requested order
 * inserts a matching power of iH_j into the product, which caps the
 * operator norm of any k-th derivative at gamma^k and the derivative of
 * the measurement objective at (2 gamma)^k. VqeInstance wires a weighted
 * Pauli-term Hamiltonian into a Hadamard-test circuit whose indicator
 * probability is 1/2 - <psi(x)|H|psi(x)>/2, then feeds that probability
 * into the phase-kickback gradient pipeline.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgrad/errors.hpp"
#include "qgrad/gradient.hpp"
#include "qgrad/oracles.hpp"

namespace qgrad::circuits {

using cplx = std::complex<double>;

/// 2x2 matrix for one of I, X, Y, Z.
Eigen::Matrix2cd pauli_matrix(char label);

/// Tensor product of single-qubit Paulis, leftmost character most
/// significant. "ZX" acts on two qubits with Z on the high qubit.
Eigen::MatrixXcd pauli_string(const std::string &labels);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXcd &a);

/**
 * @brief One tunable layer: projector-gated exponential then a fixed gate.
 *
 * The layer applies P ox e^(i x H) + (1 - P) ox 1 followed by U. P may be
 * the 1x1 identity, in which case the gate is a plain exponential of H.
 */
struct CircuitFactor {
    Eigen::MatrixXcd P; ///< orthogonal projector, high tensor slot
    Eigen::MatrixXcd H; ///< Hermitian generator, low tensor slot
    Eigen::MatrixXcd U; ///< fixed gate, full dimension

    std::int64_t dim() const { return P.rows() * H.rows(); }
};

/**
 * @brief U(x) = U0 prod_j (P_j ox e^(i x_j H_j) + (1-P_j) ox 1) U_j.
 *
 * Fixed gates are contractions (norm at most 1); generators satisfy
 * ||H_j|| <= gamma. One scalar parameter per factor.
 */
struct ParametrizedCircuit {
    Eigen::MatrixXcd U0;
    std::vector<CircuitFactor> factors;
    double gamma = 1.0;

    int parameter_count() const { return static_cast<int>(factors.size()); }
    std::int64_t dim() const { return U0.rows(); }

    /// Checks dimensions, contraction norms, Hermiticity of the
    /// generators against gamma, and that each P is an orthogonal
    /// projector. Violations raise ValidationError.
    void validate() const;
};

/// Plain product ansatz prod_j e^(-i H_j x_j) of the given generators,
/// realized by negating each generator inside the e^(+i x H) convention.
ParametrizedCircuit product_ansatz(const std::vector<Eigen::MatrixXcd> &generators,
                                   double gamma);

/// Evaluates U(x) densely. x must supply one value per factor.
Eigen::MatrixXcd build_unitary(const ParametrizedCircuit &circuit,
                               std::span<const double> x);

/**
 * @brief Exact mixed partial derivative of U(x).
 *
 * alpha holds one multiplicity per parameter; the order |alpha| is their
 * sum and must stay at most 6, with dim <= 64. Factor j contributes
 * P ox (iH)^(alpha_j) e^(i x_j H) and drops the untouched branch whenever
 * alpha_j > 0. Asserts ||d_alpha U|| <= gamma^|alpha| (InternalError on
 * violation).
 */
Eigen::MatrixXcd circuit_partial_derivative(const ParametrizedCircuit &circuit,
                                            std::span<const double> x,
                                            std::span<const int> alpha);

/// p(x) = ||Pi U(x)|0>||^2. Pi must be an orthogonal projector to 1e-10
/// (ValidationError otherwise).
double circuit_probability(const ParametrizedCircuit &circuit,
                           std::span<const double> x,
                           const Eigen::MatrixXcd &projector);

/**
 * @brief Exact derivative of the objective p(x) = <0|U(x)^dag Pi U(x)|0>.
 *
 * Expands the product rule over the ways of splitting alpha between the
 * two circuit copies and checks |d_alpha p| <= (2 gamma)^|alpha|.
 */
struct ObjectiveDerivative {
    double value = 0.0;
    double bound = 0.0;
    bool holds = false;
};

ObjectiveDerivative objective_derivative_bound_check(
    const ParametrizedCircuit &circuit, std::span<const double> x,
    std::span<const int> alpha, const Eigen::MatrixXcd &projector);

/**
 * @brief Weighted sum of unitary Hermitian terms plus a tuned ansatz.
 *
 * H = sum_j a_j T_j with a_j >= 0, sum a_j = 1, so ||H|| <= 1. The ansatz
 * prepares psi(x) from |0>; the Hadamard-test circuit turns <psi|H|psi>
 * into an indicator probability.
 */
struct VqeInstance {
    std::vector<double> weights;
    std::vector<Eigen::MatrixXcd> terms;
    std::vector<std::string> term_labels; // empty for custom matrices
    ParametrizedCircuit ansatz;
    std::vector<std::string> generator_labels;   // empty for custom ansatz
    std::vector<std::vector<int>> projector_masks; // empty when ungated
    double gamma = 1.0;

    std::int64_t system_dim() const { return ansatz.dim(); }
    int parameter_count() const { return ansatz.parameter_count(); }
    Eigen::MatrixXcd hamiltonian() const;

    /// Weight positivity and normalization (1e-12), per-term unitarity
    /// and Hermiticity (1e-10), dimension agreement.
    void validate() const;

    static VqeInstance from_json(const std::string &text);
    std::string to_json() const;
};

/**
 * @brief Hadamard-test realization of the instance objective.
 *
 * The verifier acts on system x selection x flag; prepare_w loads
 * sqrt(a_j) amplitudes on the selection register, select_h applies term
 * j on the selection state |j>, and the flag Hadamards sandwich the
 * controlled block. Indicator-1 probability is 1/2 - <psi(x)|H|psi(x)>/2.
 */
class VqeObjective {
  public:
    explicit VqeObjective(VqeInstance instance);

    const VqeInstance &instance() const { return instance_; }
    std::int64_t circuit_dim() const;

    /// Full verifier unitary at parameter point x.
    Eigen::MatrixXcd circuit_unitary(std::span<const double> x) const;

    /// Probability that the flag qubit reads 1.
    double probability(std::span<const double> x) const;

    /// Dense <psi(x)|H|psi(x)>.
    double expectation(std::span<const double> x) const;

    /// Analytic gradient of the indicator probability,
    /// -grad <psi|H|psi> / 2, from the exact circuit derivatives.
    std::vector<double> probability_gradient(std::span<const double> x) const;

    const Eigen::MatrixXcd &prepare_w() const { return prepare_; }
    const Eigen::MatrixXcd &select_h() const { return select_; }

  private:
    VqeInstance instance_;
    Eigen::MatrixXcd prepare_; // selection register load of sqrt(a_j)
    Eigen::MatrixXcd select_;  // sum_j |j><j| ox T_j in system-major order
    std::int64_t select_dim_ = 1;
};

/// Validates the instance and builds the Hadamard-test objective, checking
/// the indicator identity against the dense expectation on a probe grid
/// to 1e-10 (InternalError on mismatch).
VqeObjective vqe_objective_oracle(const VqeInstance &instance);

/**
 * @brief Gradient of the indicator probability via the smooth pipeline.
 *
 * Runs estimate_gradient_smooth on p(x) with derivative scale c (the
 * objective obeys |d_alpha p| <= 2^|alpha|, so the default is 2) and
 * slope cap matching c. Every fractional phase unit is costed as a
 * probability-to-phase conversion accurate to delta = (1/21)/units,
 * the phase slack the perturbed readout tolerates per invocation, at
 * 20 M_c probability queries per unit. The report's truth channel holds
 * the analytic gradient for error measurement.
 */
struct VqeGradientResult {
    grad::GradientReport report;
    double delta = 0.0;              ///< per-unit conversion accuracy
    int conversion_order = 0;        ///< LCU truncation order M_c
    std::uint64_t probability_queries = 0;
};

VqeGradientResult vqe_gradient(const VqeInstance &instance,
                               std::span<const double> x, double eps,
                               double rho, std::uint64_t seed,
                               oracles::Ledger ledger = nullptr,
                               double c = 2.0);

} // namespace qgrad::circuits
