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
 * @file statevec.hpp
 * Dense state-vector simulator over d registers of n qubits each.
 *
 * Layout convention: amplitudes are indexed register-major with register 0
 * in the most significant qubit block, and qubits within a register are
 * big-endian. Register computational-basis states correspond to the grid
 * labels of grid.hpp, so index j means label (2j - 2^n + 1) / 2^(n+1).
 */

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgrad/errors.hpp"
#include "qgrad/grid.hpp"

namespace qgrad::sv {

using cplx = std::complex<double>;

/// Which realization of the grid Fourier transform to use.
enum class QftPath {
    Auto,       ///< Conjugated fast path.
    Dense,      ///< Explicit matrix product (n <= 12), for verification.
    Conjugated, ///< Diagonal * standard transform * diagonal.
};

/// Grid Fourier transform matrix on one register: entries
/// exp(2*pi*i * 2^n * x_j * x_k) / sqrt(2^n) over label pairs, or the
/// conjugate transpose when inverse is set.
Eigen::MatrixXcd grid_qft_matrix(int n, bool inverse);

/// Diagonal register phase D with QFT_grid = phase * D * QFT_standard * D.
/// Returns the per-index diagonal entries and the scalar prefactor.
struct QftConjugation {
    std::vector<cplx> diagonal;
    cplx prefactor;
};
QftConjugation grid_qft_conjugation(int n, bool inverse);

/// Sampled measurement of every register.
struct Outcome {
    std::uint64_t flat = 0;
    std::vector<std::int64_t> indices;
    std::vector<double> labels;
};

class StateVector {
  public:
    /// |0...0> on regs registers of n qubits. Guarded by n*regs <= 26.
    StateVector(int regs, int n);

    /// Uniform superposition over all labels (Hadamard on every qubit).
    static StateVector uniform(int regs, int n);

    /// Basis state at the given flat index.
    static StateVector basis(int regs, int n, std::uint64_t flat);

    int registers() const { return regs_; }
    int register_qubits() const { return n_; }
    int total_qubits() const { return regs_ * n_; }
    std::uint64_t size() const { return amps_.size(); }

    cplx amp(std::uint64_t flat) const { return amps_[flat]; }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes_mut() { return amps_; }

    /// Multiplies each amplitude by exp(i * phase_fn(label vector)).
    /// phase_fn returns radians; non-finite values raise NumericError.
    void apply_diagonal_phase(
        const std::function<double(std::span<const double>)> &phase_fn);

    /// Grid Fourier transform on one register.
    void qft_grid(int reg, QftPath path = QftPath::Auto);
    void inverse_qft_grid(int reg, QftPath path = QftPath::Auto);

    /// Applies a unitary on the listed qubits (global indices, 0 = most
    /// significant). qubits.size() <= 12; unitarity checked to 1e-10.
    void apply_unitary(const Eigen::MatrixXcd &U, std::span<const int> qubits);

    /// Squared-norm of the state.
    double norm() const;

    /// Exact outcome probabilities by flat index. Guarded by n*regs <= 22.
    std::vector<double> output_distribution() const;

    /// One full measurement of all registers. Norm must be 1 within 1e-6.
    Outcome measure_registers(std::mt19937_64 &rng) const;

    /// count independent measurements in draw order (single sweep).
    std::vector<Outcome> sample(std::mt19937_64 &rng, int count) const;

    /// Binary snapshot ("QGSV" header + little-endian re/im doubles).
    void save(const std::string &path) const;
    static StateVector load(const std::string &path, int regs);

  private:
    int regs_ = 0;
    int n_ = 0;
    std::vector<cplx> amps_;

    Outcome decode(std::uint64_t flat) const;
    void transform_register(int reg, bool inverse, QftPath path);
};

} // namespace qgrad::sv
