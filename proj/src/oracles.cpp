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

#include "qgrad/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace qgrad::oracles {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

// Largest dimension we are willing to handle with dense algebra. The formal
// cap on system+ancillas is 22 qubits; dense matrix products stop being
// practical well before that.
constexpr std::int64_t kMaxDenseDim = int64_t{1} << 12;

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(std::int64_t v) {
    int k = 0;
    while ((int64_t{1} << k) < v)
        ++k;
    return k;
}

void check_unitary(const Eigen::MatrixXcd &U, const char *what,
                   double tol = 1e-10) {
    Eigen::MatrixXcd gram = U.adjoint() * U;
    gram -= Eigen::MatrixXcd::Identity(U.rows(), U.cols());
    double dev = gram.cwiseAbs().maxCoeff();
    if (dev > tol) {
        std::ostringstream os;
        os << what << ": matrix is not unitary (deviation " << dev << ")";
        throw ValidationError(os.str());
    }
}

Eigen::MatrixXcd masked_projector_times(const std::vector<bool> &mask,
                                        const Eigen::MatrixXcd &A) {
    Eigen::MatrixXcd out = A;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        if (!mask[static_cast<std::size_t>(i)])
            out.row(i).setZero();
    return out;
}

// (2 Pi - I) A computed row-wise from the projector mask.
Eigen::MatrixXcd reflect_rows(const std::vector<bool> &mask,
                              const Eigen::MatrixXcd &A) {
    Eigen::MatrixXcd out = A;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        if (!mask[static_cast<std::size_t>(i)])
            out.row(i) = -out.row(i);
    return out;
}

} // namespace

std::uint64_t QueryLedger::charge_phase(double power, bool controlled,
                                        bool inverse) {
    if (!std::isfinite(power))
        throw DomainError("phase query power must be finite");
    auto units = static_cast<std::uint64_t>(std::ceil(std::abs(power)));
    phase_.fetch_add(units, std::memory_order_relaxed);
    if (log_calls_) {
        std::lock_guard<std::mutex> lock(mu_);
        calls_.push_back({power, controlled, inverse});
    }
    return units;
}

void QueryLedger::charge_probability(std::uint64_t count) {
    prob_.fetch_add(count, std::memory_order_relaxed);
}

std::vector<CallRecord> QueryLedger::calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

void QueryLedger::reset() {
    std::lock_guard<std::mutex> lock(mu_);
    prob_.store(0);
    phase_.store(0);
    calls_.clear();
}

std::string QueryLedger::to_json() const {
    nlohmann::json j;
    j["probability_queries"] = probability_queries();
    j["phase_query_units"] = phase_query_units();
    auto recorded = calls();
    auto arr = nlohmann::json::array();
    for (const auto &c : recorded) {
        arr.push_back({{"power", c.power},
                       {"controlled", c.controlled},
                       {"inverse", c.inverse}});
    }
    j["calls"] = std::move(arr);
    return j.dump();
}

void PhaseOracle::apply(sv::StateVector &state, double power,
                        bool inverse) const {
    if (ledger_)
        ledger_->charge_phase(power, false, inverse);
    if (power == 0.0)
        return;
    const double sign = inverse ? -1.0 : 1.0;
    state.apply_diagonal_phase(
        [&](std::span<const double> labels) { return sign * power * f_(labels); });
}

double DenseProbabilityOracle::probability_of(std::int64_t x) const {
    const std::int64_t aux_dim = int64_t{1} << n_aux;
    if (x < 0 || x >= sys_dim)
        throw DomainError("probability_of: system index out of range");
    const Eigen::Index col = static_cast<Eigen::Index>(x * aux_dim);
    double mass = 0.0;
    for (Eigen::Index row = 1; row < U.rows(); row += 2)
        mass += std::norm(U(row, col));
    return mass;
}

void DenseProbabilityOracle::validate() const {
    if (n_aux < 1)
        throw ConfigError("probability oracle needs at least one ancilla");
    const std::int64_t aux_dim = int64_t{1} << n_aux;
    if (U.rows() != U.cols() || U.rows() != sys_dim * aux_dim)
        throw ConfigError("probability oracle dimension mismatch");
    check_unitary(U, "probability oracle");
}

DenseProbabilityOracle build_probability_oracle(std::span<const double> p,
                                                int n_aux, Ledger ledger) {
    if (n_aux < 1)
        throw ConfigError("build_probability_oracle: n_aux must be >= 1");
    if (p.empty())
        throw ConfigError("build_probability_oracle: empty probability table");
    const auto sys_dim = static_cast<std::int64_t>(p.size());
    const std::int64_t aux_dim = int64_t{1} << n_aux;
    const std::int64_t dim = sys_dim * aux_dim;
    if (dim > kMaxDenseDim)
        throw ResourceError("build_probability_oracle: dense realization too large");

    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(dim, dim);
    for (std::int64_t x = 0; x < sys_dim; ++x) {
        double px = p[static_cast<std::size_t>(x)];
        if (px < -1e-12 || px > 1.0 + 1e-12)
            throw DomainError("build_probability_oracle: p outside [0, 1]");
        px = std::clamp(px, 0.0, 1.0);
        const double s = std::sqrt(px);
        const double c = std::sqrt(1.0 - px);
        // Givens rotation on the first two ancilla levels of sector x; the
        // flag qubit is the ancilla LSB, so levels 0 and 1 differ in it.
        const Eigen::Index i0 = static_cast<Eigen::Index>(x * aux_dim);
        const Eigen::Index i1 = i0 + 1;
        U(i0, i0) = c;
        U(i1, i0) = s;
        U(i0, i1) = -s;
        U(i1, i1) = c;
    }
    DenseProbabilityOracle oracle{std::move(U), sys_dim, n_aux,
                                  std::move(ledger)};
    return oracle;
}

Eigen::MatrixXcd grover_operator(const DenseProbabilityOracle &oracle) {
    oracle.validate();
    const std::int64_t aux_dim = int64_t{1} << oracle.n_aux;
    const Eigen::Index dim = oracle.U.rows();

    std::vector<bool> zero_mask(static_cast<std::size_t>(dim), false);
    std::vector<bool> flag_mask(static_cast<std::size_t>(dim), false);
    for (Eigen::Index i = 0; i < dim; ++i) {
        zero_mask[static_cast<std::size_t>(i)] = (i % aux_dim) == 0;
        flag_mask[static_cast<std::size_t>(i)] = (i % 2) == 1;
    }

    // Flag reflection with the phase-flip-on-marked sign, so the induced
    // rotation on each block is by +2 theta(x) rather than pi - 2 theta(x).
    Eigen::MatrixXcd G = masked_projector_times(flag_mask, oracle.U);
    G = oracle.U - 2.0 * G;                       // (I - 2 Pi2) U
    G = oracle.U.adjoint() * G;                   // U^dag (I - 2 Pi2) U
    return reflect_rows(zero_mask, G);            // (2 Pi1 - I) ...
}

cplx LcuCoefficients::series(double theta) const {
    cplx acc = 0.0;
    for (int m = -M; m <= M; ++m)
        acc += at(m) * std::exp(cplx{0.0, 2.0 * m * theta});
    return acc;
}

LcuCoefficients lcu_beta(int M, double r) {
    if (M < 0 || M > 60)
        throw DomainError("lcu_beta: order must lie in [0, 60]");
    if (!(std::abs(r) <= 1.0))
        throw DomainError("lcu_beta: fractional power must satisfy |r| <= 1");

    LcuCoefficients out;
    out.M = M;
    out.r = r;
    out.beta.assign(static_cast<std::size_t>(2 * M + 1), cplx{0.0, 0.0});

    const double ln_abs_r = (r == 0.0) ? 0.0 : std::log(std::abs(r));
    for (int m = -M; m <= M; ++m) {
        cplx acc = 0.0;
        for (int k = std::abs(m); k <= M; ++k) {
            if (r == 0.0 && k > 0)
                continue;
            // C(2k, k-m) / (k! 4^k) * |r|^k in log space
            const double ln_mag = std::lgamma(2.0 * k + 1.0) -
                                  std::lgamma(static_cast<double>(k - m) + 1.0) -
                                  std::lgamma(static_cast<double>(k + m) + 1.0) -
                                  std::lgamma(k + 1.0) -
                                  k * std::log(4.0) + k * ln_abs_r;
            double mag = std::exp(ln_mag);
            if (m % 2 != 0)
                mag = -mag;
            if (r < 0.0 && k % 2 != 0)
                mag = -mag;
            switch (k % 4) { // i^k
            case 0: acc += cplx{mag, 0.0}; break;
            case 1: acc += cplx{0.0, mag}; break;
            case 2: acc += cplx{-mag, 0.0}; break;
            default: acc += cplx{0.0, -mag}; break;
            }
        }
        out.beta[static_cast<std::size_t>(M + m)] = acc;
    }
    for (const auto &b : out.beta)
        out.l1 += std::abs(b);
    if (out.l1 > std::exp(std::abs(r)) + 1e-9)
        throw InternalError("lcu_beta: coefficient mass exceeded its envelope");
    return out;
}

TruncationCheck lcu_truncation_check(int M, double r, int grid) {
    const LcuCoefficients beta = lcu_beta(M, r);
    TruncationCheck out;
    out.bound = std::exp(-std::lgamma(M + 1.0)); // 1/M!
    for (int g = 0; g < grid; ++g) {
        const double theta = kPi * g / grid;
        const double s = std::sin(theta);
        const cplx exact = std::exp(cplx{0.0, r * s * s});
        out.max_deviation =
            std::max(out.max_deviation, std::abs(exact - beta.series(theta)));
    }
    out.holds = out.max_deviation <= out.bound + 1e-15;
    return out;
}

int lcu_order_for(double eps_over_10) {
    if (!(eps_over_10 > 0.0))
        throw DomainError("lcu_order_for: threshold must be positive");
    for (int M = 1; M <= 60; ++M) {
        if (M * (1.0 - std::log(static_cast<double>(M))) <=
            std::log(eps_over_10))
            return M;
    }
    throw DomainError("lcu_order_for: threshold requires order above 60");
}

namespace {

// Householder completion of a real unit vector into a unitary whose first
// column is that vector.
Eigen::MatrixXcd prepare_unitary(const Eigen::VectorXd &w) {
    const Eigen::Index dim = w.size();
    Eigen::VectorXd v = -w;
    v(0) += 1.0;
    const double vv = v.squaredNorm();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(dim, dim);
    if (vv > 1e-28)
        P -= (2.0 / vv) * (v * v.transpose());
    return P.cast<cplx>();
}

struct ConversionRound {
    Eigen::MatrixXcd O;
    int M = 0;
    int a = 0;
    std::uint64_t queries = 0;
};

// One eps-accurate realization of |x> -> e^(i r p(x)) |x> on
// sys x aux x prep x rot, following the linear-combination construction
// with k = 2 amplification rounds.
ConversionRound conversion_round(const DenseProbabilityOracle &oracle,
                                 double eps, double r) {
    const int M = lcu_order_for(eps / 10.0);
    const LcuCoefficients beta = lcu_beta(M, r);

    const int a = static_cast<int>(std::ceil(std::log2(2.0 * M + 1.0))) + 1;
    const std::int64_t sysaux_dim = oracle.U.rows();
    const std::int64_t prep_dim = int64_t{1} << (a - 1);
    const std::int64_t total_dim = sysaux_dim * prep_dim * 2;

    const std::int64_t total_qubits =
        log2_exact(sysaux_dim) + a; // sysaux assumed power of two
    if (!is_pow2(sysaux_dim))
        throw ConfigError("probability_to_phase: dimensions must be powers of two");
    if (total_qubits > 22)
        throw ResourceError("probability_to_phase: more than 22 qubits required");
    if (total_dim > kMaxDenseDim)
        throw ResourceError("probability_to_phase: dense construction limited to 12 qubits");

    // Grover powers G^m for |m| <= M.
    const Eigen::MatrixXcd G = grover_operator(oracle);
    std::vector<Eigen::MatrixXcd> pow_pos(static_cast<std::size_t>(M) + 1);
    std::vector<Eigen::MatrixXcd> pow_neg(static_cast<std::size_t>(M) + 1);
    pow_pos[0] = pow_neg[0] =
        Eigen::MatrixXcd::Identity(sysaux_dim, sysaux_dim);
    const Eigen::MatrixXcd Gdag = G.adjoint();
    for (int m = 1; m <= M; ++m) {
        pow_pos[static_cast<std::size_t>(m)] =
            G * pow_pos[static_cast<std::size_t>(m - 1)];
        pow_neg[static_cast<std::size_t>(m)] =
            Gdag * pow_neg[static_cast<std::size_t>(m - 1)];
    }

    // select = sum_m phase(beta_m) G^m (x) |m><m| on sysaux x prep; the
    // coefficient phases live here so the prepare vector stays real.
    Eigen::MatrixXcd select = Eigen::MatrixXcd::Zero(sysaux_dim * prep_dim,
                                                     sysaux_dim * prep_dim);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(prep_dim);
    for (std::int64_t slot = 0; slot < prep_dim; ++slot) {
        const int m = static_cast<int>(slot) - M;
        const Eigen::MatrixXcd *block;
        cplx phase{1.0, 0.0};
        if (slot < 2 * M + 1) {
            const cplx b = beta.at(m);
            if (std::abs(b) > 0.0)
                phase = b / std::abs(b);
            block = (m >= 0) ? &pow_pos[static_cast<std::size_t>(m)]
                             : &pow_neg[static_cast<std::size_t>(-m)];
            w(slot) = std::sqrt(std::abs(b) / beta.l1);
        } else {
            block = &pow_pos[0]; // unused slots act as identity
        }
        for (Eigen::Index row = 0; row < sysaux_dim; ++row)
            for (Eigen::Index col = 0; col < sysaux_dim; ++col) {
                const cplx val = phase * (*block)(row, col);
                if (val != cplx{0.0, 0.0})
                    select(row * prep_dim + slot, col * prep_dim + slot) = val;
            }
    }
    // Normalize against rounding in the square roots.
    w /= w.norm();

    const Eigen::MatrixXcd prep = prepare_unitary(w);
    Eigen::MatrixXcd prep_full =
        Eigen::MatrixXcd::Zero(select.rows(), select.cols());
    for (Eigen::Index blk = 0; blk < sysaux_dim; ++blk)
        prep_full.block(blk * prep_dim, blk * prep_dim, prep_dim, prep_dim) =
            prep;
    const Eigen::MatrixXcd V =
        prep_full.adjoint() * select * prep_full;

    // Success-amplitude trim to sin(pi/10) on one extra qubit.
    const double s_target = std::sin(kPi / 10.0) * beta.l1;
    if (s_target > 1.0)
        throw InternalError("probability_to_phase: rotation amplitude above one");
    const double c_target = std::sqrt(1.0 - s_target * s_target);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(total_dim, total_dim);
    for (Eigen::Index row = 0; row < V.rows(); ++row)
        for (Eigen::Index col = 0; col < V.cols(); ++col) {
            const cplx val = V(row, col);
            if (val == cplx{0.0, 0.0})
                continue;
            W(2 * row, 2 * col) = val * s_target;
            W(2 * row + 1, 2 * col) = val * c_target;
            W(2 * row, 2 * col + 1) = val * (-c_target);
            W(2 * row + 1, 2 * col + 1) = val * s_target;
        }

    const std::int64_t aux_dim = int64_t{1} << oracle.n_aux;
    const std::int64_t anc_dim = prep_dim * 2;
    std::vector<bool> pi1(static_cast<std::size_t>(total_dim), false);
    std::vector<bool> pi2(static_cast<std::size_t>(total_dim), false);
    for (std::int64_t i = 0; i < total_dim; ++i) {
        const bool anc_zero = (i % anc_dim) == 0;
        pi2[static_cast<std::size_t>(i)] = anc_zero;
        pi1[static_cast<std::size_t>(i)] =
            anc_zero && ((i / anc_dim) % aux_dim) == 0;
    }

    // Two amplification rounds: O = G_a^2 W, G_a = W (2 Pi1 - I) W^dag (2 Pi2 - I).
    Eigen::MatrixXcd Ga = reflect_rows(pi2, Eigen::MatrixXcd::Identity(
                                                total_dim, total_dim));
    Ga = W.adjoint() * Ga;
    Ga = reflect_rows(pi1, Ga);
    Ga = W * Ga;
    ConversionRound out;
    out.O = Ga * (Ga * W);
    out.M = M;
    out.a = a;
    // 2 (2k+1) M Grover steps, two oracle queries each, k = 2.
    out.queries = static_cast<std::uint64_t>(20) * static_cast<std::uint64_t>(M);
    return out;
}

} // namespace

PhaseConversion probability_to_phase(const DenseProbabilityOracle &oracle,
                                     double eps, double r) {
    if (!(eps > 0.0 && eps < 1.0 / 3.0))
        throw DomainError("probability_to_phase: precision must lie in (0, 1/3)");
    if (!(std::abs(r) <= 1.0) || r == 0.0)
        throw DomainError("probability_to_phase: power must lie in [-1, 1] and be nonzero");
    oracle.validate();

    ConversionRound round = conversion_round(oracle, eps, r);

    PhaseConversion out;
    out.O = std::move(round.O);
    out.M = round.M;
    out.a = round.a;
    out.rounds = 1;
    out.power = r;
    out.probability_queries = round.queries;
    if (oracle.ledger)
        oracle.ledger->charge_probability(round.queries);

    const std::int64_t aux_dim = int64_t{1} << oracle.n_aux;
    const std::int64_t anc_dim = out.O.rows() / oracle.U.rows();
    out.p.resize(static_cast<std::size_t>(oracle.sys_dim));
    for (std::int64_t x = 0; x < oracle.sys_dim; ++x) {
        const double px = oracle.probability_of(x);
        out.p[static_cast<std::size_t>(x)] = px;
        const Eigen::Index idx =
            static_cast<Eigen::Index>(x * aux_dim * anc_dim);
        Eigen::VectorXcd expect =
            Eigen::VectorXcd::Zero(out.O.rows());
        expect(idx) = std::exp(cplx{0.0, r * px});
        const double dev = (out.O.col(idx) - expect).norm();
        out.max_deviation = std::max(out.max_deviation, dev);
    }
    if (out.max_deviation > eps) {
        std::ostringstream os;
        os << "probability_to_phase: certification failed, max deviation "
           << out.max_deviation << " above " << eps;
        throw InternalError(os.str());
    }
    return out;
}

AmplificationResult oblivious_amplitude_amplify(
    const Eigen::MatrixXcd &W, const std::vector<bool> &pi1_mask,
    const std::vector<bool> &pi2_mask, int k, const Eigen::MatrixXcd &U,
    double eps) {
    const Eigen::Index dim = W.rows();
    if (W.cols() != dim || U.rows() != dim || U.cols() != dim)
        throw ConfigError("oblivious_amplitude_amplify: dimension mismatch");
    if (pi1_mask.size() != static_cast<std::size_t>(dim) ||
        pi2_mask.size() != static_cast<std::size_t>(dim))
        throw ConfigError("oblivious_amplitude_amplify: projector mask size mismatch");
    if (k < 0)
        throw ConfigError("oblivious_amplitude_amplify: negative round count");
    if (eps < 0.0 || eps > 0.5)
        throw DomainError("oblivious_amplitude_amplify: eps must lie in [0, 1/2]");
    check_unitary(W, "oblivious_amplitude_amplify: W");

    const double sin_theta = std::sin(kPi / (2.0 * (2 * k + 1)));

    // Premise: || (Pi2 W - sin(theta) U) Pi1 || <= sin(theta) eps.
    Eigen::MatrixXcd E = masked_projector_times(pi2_mask, W) - sin_theta * U;
    for (Eigen::Index col = 0; col < dim; ++col)
        if (!pi1_mask[static_cast<std::size_t>(col)])
            E.col(col).setZero();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(E, Eigen::ComputeThinV);
    AmplificationResult out;
    out.premise_norm = svd.singularValues()(0);
    if (out.premise_norm > sin_theta * eps + 1e-9) {
        Eigen::VectorXcd worst = svd.matrixV().col(0);
        Eigen::Index worst_idx = 0;
        worst.cwiseAbs().maxCoeff(&worst_idx);
        std::ostringstream os;
        os << "oblivious_amplitude_amplify: premise violated, deviation "
           << out.premise_norm << " above " << sin_theta * eps
           << "; worst input concentrates on basis state " << worst_idx;
        throw DomainError(os.str());
    }

    Eigen::MatrixXcd A = W;
    if (k > 0) {
        // The global minus matters: without it each round flips the sign
        // of the rotated block, so odd k would land on -U instead of U.
        Eigen::MatrixXcd G =
            reflect_rows(pi2_mask, Eigen::MatrixXcd::Identity(dim, dim));
        G = W.adjoint() * G;
        G = reflect_rows(pi1_mask, G);
        G = -(W * G);
        for (int round = 0; round < k; ++round)
            A = G * A;
    }

    for (Eigen::Index col = 0; col < dim; ++col) {
        if (!pi1_mask[static_cast<std::size_t>(col)])
            continue;
        const double dev = (A.col(col) - U.col(col)).norm();
        out.max_deviation = std::max(out.max_deviation, dev);
    }
    out.amplified = std::move(A);
    return out;
}

DistributionSimulation distribution_hamiltonian_simulation(
    const Eigen::MatrixXcd &U_dist, std::int64_t x_dim, std::int64_t psi_dim,
    double t, double eps, Ledger ledger) {
    if (!is_pow2(x_dim) || !is_pow2(psi_dim))
        throw ConfigError("distribution_hamiltonian_simulation: dimensions must be powers of two");
    if (U_dist.rows() != x_dim * psi_dim || U_dist.cols() != U_dist.rows())
        throw ConfigError("distribution_hamiltonian_simulation: oracle dimension mismatch");
    if (!(eps > 0.0 && eps < 1.0))
        throw DomainError("distribution_hamiltonian_simulation: precision must lie in (0, 1)");
    if (!std::isfinite(t))
        throw DomainError("distribution_hamiltonian_simulation: time must be finite");
    check_unitary(U_dist, "distribution_hamiltonian_simulation: U");

    DistributionSimulation out;
    if (t == 0.0) {
        out.O = Eigen::MatrixXcd::Identity(x_dim, x_dim);
        out.oracle.sys_dim = x_dim;
        out.oracle.ledger = std::move(ledger);
        return out;
    }

    // Probability oracle over sys = outcome register, aux = (copy, residual,
    // flag). A Hadamard sandwich around a reflection on (copy == outcome,
    // flag) turns the preparation oracle into a flagged-branch oracle for
    // p(x); the flag sits on the aux LSB so no swap is needed.
    const std::int64_t aux_dim = x_dim * psi_dim * 2;
    const std::int64_t dim = x_dim * aux_dim;
    if (dim > kMaxDenseDim)
        throw ResourceError("distribution_hamiltonian_simulation: dense construction limited to 12 qubits");

    Eigen::MatrixXcd step = Eigen::MatrixXcd::Zero(dim, dim);
    const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    // I (x) H on the flag qubit.
    for (std::int64_t base = 0; base < dim; base += 2) {
        step(base, base) = inv_sqrt2;
        step(base, base + 1) = inv_sqrt2;
        step(base + 1, base) = inv_sqrt2;
        step(base + 1, base + 1) = -inv_sqrt2;
    }
    const Eigen::MatrixXcd H_flag = step;

    // I_x (x) U_dist (x) I_2
    Eigen::MatrixXcd mid = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::int64_t x = 0; x < x_dim; ++x) {
        const std::int64_t off = x * aux_dim;
        for (Eigen::Index rr = 0; rr < U_dist.rows(); ++rr)
            for (Eigen::Index cc = 0; cc < U_dist.cols(); ++cc) {
                const cplx val = U_dist(rr, cc);
                if (val == cplx{0.0, 0.0})
                    continue;
                mid(off + 2 * rr, off + 2 * cc) = val;
                mid(off + 2 * rr + 1, off + 2 * cc + 1) = val;
            }
    }

    Eigen::MatrixXcd U_p = mid * H_flag;
    // Reflection: -1 on components with copy == outcome and flag set.
    for (std::int64_t x = 0; x < x_dim; ++x)
        for (std::int64_t s = 0; s < psi_dim; ++s) {
            const std::int64_t row = ((x * x_dim + x) * psi_dim + s) * 2 + 1;
            U_p.row(row) = -U_p.row(row);
        }
    U_p = H_flag * U_p;

    out.oracle.U = std::move(U_p);
    out.oracle.sys_dim = x_dim;
    out.oracle.n_aux = log2_exact(aux_dim);
    out.oracle.ledger = std::move(ledger);
    out.oracle.validate();

    out.rounds = static_cast<int>(std::ceil(std::abs(t)));
    const double r = t / out.rounds;
    const double eps_round = eps / out.rounds;

    ConversionRound round = conversion_round(out.oracle, eps_round, r);
    out.M = round.M;
    out.probability_queries =
        round.queries * static_cast<std::uint64_t>(out.rounds);
    if (out.oracle.ledger)
        out.oracle.ledger->charge_probability(out.probability_queries);

    out.O = round.O;
    for (int rep = 1; rep < out.rounds; ++rep)
        out.O = round.O * out.O;

    const std::int64_t anc_dim = out.O.rows() / dim;
    out.p.resize(static_cast<std::size_t>(x_dim));
    for (std::int64_t x = 0; x < x_dim; ++x) {
        const double px = out.oracle.probability_of(x);
        out.p[static_cast<std::size_t>(x)] = px;
        const Eigen::Index idx =
            static_cast<Eigen::Index>(x * aux_dim * anc_dim);
        Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(out.O.rows());
        expect(idx) = std::exp(cplx{0.0, t * px});
        const double dev = (out.O.col(idx) - expect).norm();
        out.max_deviation = std::max(out.max_deviation, dev);
    }
    if (out.max_deviation > eps) {
        std::ostringstream os;
        os << "distribution_hamiltonian_simulation: certification failed, max deviation "
           << out.max_deviation << " above " << eps;
        throw InternalError(os.str());
    }
    return out;
}

} // namespace qgrad::oracles
