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

#include "qgrad/statevec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "qgrad/rng.hpp"

namespace qgrad::sv {

namespace {

constexpr double kPi = std::numbers::pi;

void check_shape(int regs, int n) {
    if (regs < 1 || n < 1) {
        throw ConfigError("state needs at least one register and one qubit");
    }
    if (regs * n > grid::kMaxTotalQubits) {
        throw ResourceError("state of " + std::to_string(regs * n) +
                            " qubits exceeds the " +
                            std::to_string(grid::kMaxTotalQubits) +
                            "-qubit guard");
    }
}

/// In-place radix-2 transform of a contiguous length-N line with kernel
/// exp(sign * 2*pi*i * j*l / N), unnormalized.
void fft_line(cplx *a, std::int64_t N, const std::vector<cplx> &roots) {
    // Bit-reversal permutation.
    for (std::int64_t i = 1, j = 0; i < N; ++i) {
        std::int64_t bit = N >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::int64_t len = 2; len <= N; len <<= 1) {
        const std::int64_t step = N / len;
        for (std::int64_t i = 0; i < N; i += len) {
            for (std::int64_t j = 0; j < len / 2; ++j) {
                const cplx w = roots[static_cast<std::size_t>(j * step)];
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace

Eigen::MatrixXcd grid_qft_matrix(int n, bool inverse) {
    if (n < 1 || n > 12) {
        throw ConfigError("dense transform matrix limited to n <= 12");
    }
    const std::int64_t N = grid::register_size(n);
    const std::vector<double> lab = grid::labels(n);
    const double sign = inverse ? -1.0 : 1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    Eigen::MatrixXcd M(N, N);
    for (std::int64_t row = 0; row < N; ++row) {
        for (std::int64_t col = 0; col < N; ++col) {
            const double ph = sign * 2.0 * kPi * static_cast<double>(N) *
                              lab[static_cast<std::size_t>(row)] *
                              lab[static_cast<std::size_t>(col)];
            M(row, col) = scale * cplx(std::cos(ph), std::sin(ph));
        }
    }
    return M;
}

QftConjugation grid_qft_conjugation(int n, bool inverse) {
    const std::int64_t N = grid::register_size(n);
    const double sign = inverse ? -1.0 : 1.0;
    QftConjugation c;
    c.diagonal.resize(static_cast<std::size_t>(N));
    for (std::int64_t j = 0; j < N; ++j) {
        // From (2j - N + 1)(2l - N + 1) = 4jl - 2(N-1)(j + l) + (N-1)^2.
        const double ph = -sign * kPi * static_cast<double>(j) *
                          static_cast<double>(N - 1) / static_cast<double>(N);
        c.diagonal[static_cast<std::size_t>(j)] = cplx(std::cos(ph), std::sin(ph));
    }
    const double pc = sign * kPi * static_cast<double>(N - 1) *
                      static_cast<double>(N - 1) / (2.0 * static_cast<double>(N));
    c.prefactor = cplx(std::cos(pc), std::sin(pc));
    return c;
}

StateVector::StateVector(int regs, int n) : regs_(regs), n_(n) {
    check_shape(regs, n);
    amps_.assign(std::uint64_t{1} << (regs * n), cplx(0.0, 0.0));
    amps_[0] = cplx(1.0, 0.0);
}

StateVector StateVector::uniform(int regs, int n) {
    StateVector s(regs, n);
    const double a = 1.0 / std::sqrt(static_cast<double>(s.size()));
    std::fill(s.amps_.begin(), s.amps_.end(), cplx(a, 0.0));
    return s;
}

StateVector StateVector::basis(int regs, int n, std::uint64_t flat) {
    StateVector s(regs, n);
    if (flat >= s.size()) throw ConfigError("basis index out of range");
    s.amps_[0] = cplx(0.0, 0.0);
    s.amps_[flat] = cplx(1.0, 0.0);
    return s;
}

void StateVector::apply_diagonal_phase(
    const std::function<double(std::span<const double>)> &phase_fn) {
    const std::int64_t N = grid::register_size(n_);
    const std::vector<double> lab = grid::labels(n_);

    std::vector<std::int64_t> idx(static_cast<std::size_t>(regs_), 0);
    std::vector<double> lv(static_cast<std::size_t>(regs_), lab[0]);
    const std::uint64_t total = size();
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        const double ph = phase_fn(lv);
        if (!std::isfinite(ph)) {
            throw NumericError("non-finite phase at flat index " +
                               std::to_string(flat));
        }
        amps_[flat] *= cplx(std::cos(ph), std::sin(ph));
        for (int i = regs_ - 1; i >= 0; --i) {
            if (++idx[i] < N) {
                lv[i] = lab[static_cast<std::size_t>(idx[i])];
                break;
            }
            idx[i] = 0;
            lv[i] = lab[0];
        }
    }
}

void StateVector::transform_register(int reg, bool inverse, QftPath path) {
    if (reg < 0 || reg >= regs_) throw ConfigError("register index out of range");
    const std::int64_t N = grid::register_size(n_);
    const std::uint64_t stride = std::uint64_t{1}
                                 << (n_ * (regs_ - 1 - reg));
    const std::uint64_t block = stride * static_cast<std::uint64_t>(N);

    if (path == QftPath::Dense) {
        const Eigen::MatrixXcd M = grid_qft_matrix(n_, inverse);
        Eigen::VectorXcd in(N), out(N);
        for (std::uint64_t base = 0; base < size(); base += block) {
            for (std::uint64_t off = 0; off < stride; ++off) {
                for (std::int64_t t = 0; t < N; ++t) {
                    in(t) = amps_[base + off + stride * static_cast<std::uint64_t>(t)];
                }
                out.noalias() = M * in;
                for (std::int64_t t = 0; t < N; ++t) {
                    amps_[base + off + stride * static_cast<std::uint64_t>(t)] = out(t);
                }
            }
        }
        return;
    }

    const QftConjugation c = grid_qft_conjugation(n_, inverse);
    const double sign = inverse ? -1.0 : 1.0;
    std::vector<cplx> roots(static_cast<std::size_t>(N));
    for (std::int64_t k = 0; k < N; ++k) {
        const double ph = sign * 2.0 * kPi * static_cast<double>(k) /
                          static_cast<double>(N);
        roots[static_cast<std::size_t>(k)] = cplx(std::cos(ph), std::sin(ph));
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<cplx> line(static_cast<std::size_t>(N));
    for (std::uint64_t base = 0; base < size(); base += block) {
        for (std::uint64_t off = 0; off < stride; ++off) {
            for (std::int64_t t = 0; t < N; ++t) {
                line[static_cast<std::size_t>(t)] =
                    amps_[base + off + stride * static_cast<std::uint64_t>(t)] *
                    c.diagonal[static_cast<std::size_t>(t)];
            }
            fft_line(line.data(), N, roots);
            for (std::int64_t t = 0; t < N; ++t) {
                amps_[base + off + stride * static_cast<std::uint64_t>(t)] =
                    line[static_cast<std::size_t>(t)] *
                    c.diagonal[static_cast<std::size_t>(t)] * c.prefactor * scale;
            }
        }
    }
}

void StateVector::qft_grid(int reg, QftPath path) {
    transform_register(reg, false, path);
}

void StateVector::inverse_qft_grid(int reg, QftPath path) {
    transform_register(reg, true, path);
}

void StateVector::apply_unitary(const Eigen::MatrixXcd &U,
                                std::span<const int> qubits) {
    const int k = static_cast<int>(qubits.size());
    if (k < 1 || k > 12) {
        throw ConfigError("apply_unitary supports 1..12 target qubits");
    }
    const std::int64_t dim = std::int64_t{1} << k;
    if (U.rows() != dim || U.cols() != dim) {
        throw ValidationError("matrix dimension does not match target count");
    }
    const double dev = (U.adjoint() * U - Eigen::MatrixXcd::Identity(dim, dim))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > 1e-10) {
        throw ValidationError("matrix is not unitary (deviation " +
                              std::to_string(dev) + ")");
    }

    const int nq = total_qubits();
    std::vector<int> shifts;
    shifts.reserve(qubits.size());
    std::uint64_t tmask = 0;
    for (int q : qubits) {
        if (q < 0 || q >= nq) throw ConfigError("target qubit out of range");
        const int sh = nq - 1 - q;
        if (tmask & (std::uint64_t{1} << sh)) {
            throw ConfigError("duplicate target qubit");
        }
        tmask |= std::uint64_t{1} << sh;
        shifts.push_back(sh);
    }
    // Free (non-target) bit shifts, ascending.
    std::vector<int> free_shifts;
    for (int sh = 0; sh < nq; ++sh) {
        if (!(tmask & (std::uint64_t{1} << sh))) free_shifts.push_back(sh);
    }

    Eigen::VectorXcd in(dim), out(dim);
    const std::uint64_t blocks = size() >> k;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        std::uint64_t base = 0;
        for (std::size_t i = 0; i < free_shifts.size(); ++i) {
            if (b & (std::uint64_t{1} << i)) {
                base |= std::uint64_t{1} << free_shifts[i];
            }
        }
        for (std::int64_t row = 0; row < dim; ++row) {
            std::uint64_t idx = base;
            for (int bit = 0; bit < k; ++bit) {
                if (row & (std::int64_t{1} << (k - 1 - bit))) {
                    idx |= std::uint64_t{1} << shifts[static_cast<std::size_t>(bit)];
                }
            }
            in(row) = amps_[idx];
        }
        out.noalias() = U * in;
        for (std::int64_t row = 0; row < dim; ++row) {
            std::uint64_t idx = base;
            for (int bit = 0; bit < k; ++bit) {
                if (row & (std::int64_t{1} << (k - 1 - bit))) {
                    idx |= std::uint64_t{1} << shifts[static_cast<std::size_t>(bit)];
                }
            }
            amps_[idx] = out(row);
        }
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx &a : amps_) s += std::norm(a);
    return s;
}

std::vector<double> StateVector::output_distribution() const {
    if (total_qubits() > grid::kMaxTabulateQubits) {
        throw ResourceError("distribution table exceeds the " +
                            std::to_string(grid::kMaxTabulateQubits) +
                            "-qubit tabulation guard");
    }
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
}

Outcome StateVector::decode(std::uint64_t flat) const {
    Outcome o;
    o.flat = flat;
    o.indices.resize(static_cast<std::size_t>(regs_));
    o.labels.resize(static_cast<std::size_t>(regs_));
    const std::uint64_t N = static_cast<std::uint64_t>(grid::register_size(n_));
    for (int i = regs_ - 1; i >= 0; --i) {
        const auto j = static_cast<std::int64_t>(flat % N);
        o.indices[static_cast<std::size_t>(i)] = j;
        o.labels[static_cast<std::size_t>(i)] = grid::label(n_, j);
        flat /= N;
    }
    return o;
}

Outcome StateVector::measure_registers(std::mt19937_64 &rng) const {
    return sample(rng, 1).front();
}

std::vector<Outcome> StateVector::sample(std::mt19937_64 &rng,
                                         int count) const {
    if (count < 1) throw ConfigError("sample count must be positive");
    const double nrm = norm();
    if (std::abs(nrm - 1.0) > 1e-6) {
        throw ValidationError("state norm " + std::to_string(nrm) +
                              " is not 1 within 1e-6");
    }
    std::vector<std::pair<double, int>> draws(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) draws[static_cast<std::size_t>(i)] = {uniform01(rng), i};
    std::sort(draws.begin(), draws.end());

    std::vector<std::uint64_t> flats(static_cast<std::size_t>(count), size() - 1);
    double cum = 0.0;
    std::size_t next = 0;
    for (std::uint64_t idx = 0; idx < size() && next < draws.size(); ++idx) {
        cum += std::norm(amps_[idx]);
        while (next < draws.size() && draws[next].first < cum) {
            flats[static_cast<std::size_t>(draws[next].second)] = idx;
            ++next;
        }
    }
    std::vector<Outcome> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t f : flats) out.push_back(decode(f));
    return out;
}

void StateVector::save(const std::string &path) const {
    static_assert(std::endian::native == std::endian::little,
                  "snapshot format is little-endian");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    const char magic[4] = {'Q', 'G', 'S', 'V'};
    const std::uint32_t version = 1;
    const auto qubits = static_cast<std::uint32_t>(total_qubits());
    const std::uint32_t reserved = 0;
    f.write(magic, 4);
    f.write(reinterpret_cast<const char *>(&version), 4);
    f.write(reinterpret_cast<const char *>(&qubits), 4);
    f.write(reinterpret_cast<const char *>(&reserved), 4);
    for (const cplx &a : amps_) {
        const double re = a.real(), im = a.imag();
        f.write(reinterpret_cast<const char *>(&re), 8);
        f.write(reinterpret_cast<const char *>(&im), 8);
    }
    if (!f) throw ConfigError("short write to " + path);
}

StateVector StateVector::load(const std::string &path, int regs) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path);
    char magic[4];
    std::uint32_t version = 0, qubits = 0, reserved = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char *>(&version), 4);
    f.read(reinterpret_cast<char *>(&qubits), 4);
    f.read(reinterpret_cast<char *>(&reserved), 4);
    if (!f || std::memcmp(magic, "QGSV", 4) != 0) {
        throw ValidationError("bad snapshot magic in " + path);
    }
    if (version != 1) {
        throw ValidationError("unsupported snapshot version " +
                              std::to_string(version));
    }
    if (regs < 1 || qubits % static_cast<std::uint32_t>(regs) != 0) {
        throw ConfigError("qubit count " + std::to_string(qubits) +
                          " not divisible into " + std::to_string(regs) +
                          " registers");
    }
    StateVector s(regs, static_cast<int>(qubits) / regs);
    for (cplx &a : s.amps_) {
        double re = 0.0, im = 0.0;
        f.read(reinterpret_cast<char *>(&re), 8);
        f.read(reinterpret_cast<char *>(&im), 8);
        a = cplx(re, im);
    }
    if (!f) throw ValidationError("snapshot truncated: " + path);
    return s;
}

} // namespace qgrad::sv
