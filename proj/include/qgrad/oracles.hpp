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
 * @file oracles.hpp
 * Query-metered oracle models and the probability-to-phase conversion.
 *
 * A probability oracle marks a flagged branch with amplitude sqrt(p(x));
 * a phase oracle multiplies by exp(i t f(x)). Conversion between the two
 * runs through a linear combination of Grover-operator powers amplified
 * obliviously back onto the ancilla-zero subspace. Every oracle use is
 * charged to a QueryLedger: fractional phase powers t cost ceil(|t|) units.
 */

#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgrad/errors.hpp"
#include "qgrad/statevec.hpp"

namespace qgrad::oracles {

using cplx = std::complex<double>;

struct CallRecord {
    double power = 1.0;
    bool controlled = false;
    bool inverse = false;
};

/**
 * @brief Thread-safe query meter shared by the oracle objects.
 */
class QueryLedger {
  public:
    explicit QueryLedger(bool log_calls = false) : log_calls_(log_calls) {}

    /// Charges ceil(|power|) phase-query units (zero power is free).
    std::uint64_t charge_phase(double power, bool controlled = false,
                               bool inverse = false);
    void charge_probability(std::uint64_t count = 1);

    std::uint64_t probability_queries() const { return prob_.load(); }
    std::uint64_t phase_query_units() const { return phase_.load(); }
    std::vector<CallRecord> calls() const;
    void reset();

    std::string to_json() const;

  private:
    std::atomic<std::uint64_t> prob_{0};
    std::atomic<std::uint64_t> phase_{0};
    bool log_calls_;
    mutable std::mutex mu_;
    std::vector<CallRecord> calls_;
};

using Ledger = std::shared_ptr<QueryLedger>;
inline Ledger make_ledger(bool log_calls = false) {
    return std::make_shared<QueryLedger>(log_calls);
}

/**
 * @brief Real-valued function with metered fractional phase queries.
 */
class PhaseOracle {
  public:
    PhaseOracle(std::function<double(std::span<const double>)> f,
                Ledger ledger)
        : f_(std::move(f)), ledger_(std::move(ledger)) {}

    double value(std::span<const double> point) const { return f_(point); }
    const Ledger &ledger() const { return ledger_; }

    /// Multiplies the state by exp(i power f(labels)) and charges the
    /// ledger ceil(|power|) units.
    void apply(sv::StateVector &state, double power,
               bool inverse = false) const;

  private:
    std::function<double(std::span<const double>)> f_;
    Ledger ledger_;
};

/**
 * @brief Dense unitary realization of a probability oracle.
 *
 * Acts on system (dimension sys_dim, most significant) tensor n_aux
 * ancilla qubits. On |x>|0..0> the flagged branch carries amplitude
 * sqrt(p(x)); the flag is the least significant ancilla qubit.
 */
struct DenseProbabilityOracle {
    Eigen::MatrixXcd U;
    std::int64_t sys_dim = 0;
    int n_aux = 1;
    Ledger ledger;

    std::int64_t dim() const { return U.rows(); }
    /// p(x) recovered as the flagged-branch mass of U |x, 0..0>.
    double probability_of(std::int64_t x) const;
    void validate() const;
};

/// Canonical realization: a Givens rotation per system state, pinned to the
/// first two ancilla levels.
DenseProbabilityOracle build_probability_oracle(std::span<const double> p,
                                                int n_aux, Ledger ledger);

/// Grover operator (2 Pi_zero - 1) U^dag (1 - 2 Pi_flag) U, with the
/// flag reflection in the phase-flip-on-marked convention so that each
/// x block carries spectrum exp(+-2i asin(sqrt(p(x)))).
Eigen::MatrixXcd grover_operator(const DenseProbabilityOracle &oracle);

/**
 * @brief Fourier-in-the-Grover-angle coefficients.
 *
 * beta_m(r) = sum_{k=|m|}^{M} C(2k, k-m) (-1)^m (i r)^k / (k! 4^k), so that
 * sum_m beta_m e^(2 i m theta) = sum_{k<=M} (i r sin^2 theta)^k / k!.
 */
struct LcuCoefficients {
    int M = 0;
    double r = 1.0;
    std::vector<cplx> beta; // index m + M, m in [-M, M]
    double l1 = 0.0;

    cplx at(int m) const { return beta[static_cast<std::size_t>(M + m)]; }
    /// sum_m beta_m e^(2 i m theta)
    cplx series(double theta) const;
};

LcuCoefficients lcu_beta(int M, double r = 1.0);

/// Max over a theta grid of |e^(i r sin^2 theta) - series(theta)| together
/// with the 1/M! envelope.
struct TruncationCheck {
    double max_deviation = 0.0;
    double bound = 0.0;
    bool holds = false;
};
TruncationCheck lcu_truncation_check(int M, double r = 1.0, int grid = 2048);

/// Smallest M with (e/M)^M <= eps_over_10.
int lcu_order_for(double eps_over_10);

/**
 * @brief Result of converting a probability oracle into a phase oracle.
 */
struct PhaseConversion {
    Eigen::MatrixXcd O;  ///< acts on sys x aux x prep x rot
    int M = 0;           ///< truncation order
    int a = 0;           ///< ancilla qubits added (prep + rotation)
    int rounds = 1;      ///< fractional rounds composed
    double power = 1.0;  ///< realized exponent multiplier t in e^(i t p)
    double max_deviation = 0.0;
    std::uint64_t probability_queries = 0;
    std::vector<double> p; ///< probabilities used for certification
};

/**
 * @brief Builds an eps-accurate block realization of |x> -> e^(i r p(x))|x>.
 *
 * r must lie in [-1, 1] \ {0}; eps in (0, 1/3). Charges the ledger
 * 2 (2k+1) M probability queries with k = 2 amplification rounds.
 */
PhaseConversion probability_to_phase(const DenseProbabilityOracle &oracle,
                                     double eps, double r = 1.0);

/**
 * @brief k rounds of oblivious amplitude amplification.
 *
 * Premise: || (Pi2 W - sin(pi/(2(2k+1))) U) Pi1 || <=
 * sin(pi/(2(2k+1))) eps. Returns G^k W with the signed walk operator
 * G = -W (2 Pi1 - 1) W^dag (2 Pi2 - 1); the global minus keeps the
 * amplified amplitude at +sin((2k+1) theta) for odd k as well. Certifies
 * || (G^k W - U) |b> || <= 10 eps on a basis of Im(Pi1).
 */
struct AmplificationResult {
    Eigen::MatrixXcd amplified;
    double premise_norm = 0.0;
    double max_deviation = 0.0;
};

AmplificationResult oblivious_amplitude_amplify(
    const Eigen::MatrixXcd &W, const std::vector<bool> &pi1_mask,
    const std::vector<bool> &pi2_mask, int k, const Eigen::MatrixXcd &U,
    double eps);

/**
 * @brief Phase simulation of the outcome distribution of a state preparer.
 *
 * U_dist acts on an outcome register (dimension x_dim) tensor a residual
 * register (dimension psi_dim) and prepares sum_x sqrt(p(x)) |x>|psi_x>
 * from |0,0>. The result realizes |x> -> e^(i t p(x)) |x> to accuracy eps
 * using ceil(|t|) fractional conversion rounds.
 */
struct DistributionSimulation {
    Eigen::MatrixXcd O; ///< sys x (copy, residual, flag) x prep x rot
    DenseProbabilityOracle oracle;
    int M = 0;
    int rounds = 0;
    double max_deviation = 0.0;
    std::uint64_t probability_queries = 0;
    std::vector<double> p;
};

DistributionSimulation distribution_hamiltonian_simulation(
    const Eigen::MatrixXcd &U_dist, std::int64_t x_dim, std::int64_t psi_dim,
    double t, double eps, Ledger ledger);

} // namespace qgrad::oracles
