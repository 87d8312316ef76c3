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

#include "qgrad/circuits.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "json.hpp"

namespace qgrad::circuits {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kProjTol = 1e-10;
constexpr double kNormSlack = 1e-10;
constexpr double kIdentityTol = 1e-10;
constexpr std::int64_t kMaxDerivativeDim = 64;
constexpr int kMaxDerivativeOrder = 6;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

bool is_hermitian(const Eigen::MatrixXcd &h, double tol) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// P ox ((iH)^mult e^(i x H)) + [mult == 0] (1-P) ox 1.
Eigen::MatrixXcd gate_matrix(const CircuitFactor &factor, double x, int mult) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(factor.H);
    if (es.info() != Eigen::Success)
        throw NumericError("circuits: generator eigendecomposition failed");
    const Eigen::MatrixXcd &v = es.eigenvectors();
    Eigen::VectorXcd phases(factor.H.rows());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(cplx(0.0, x * es.eigenvalues()(i)));
    Eigen::MatrixXcd expm = v * phases.asDiagonal() * v.adjoint();
    if (mult > 0) {
        Eigen::MatrixXcd ih = cplx(0.0, 1.0) * factor.H;
        for (int k = 0; k < mult; ++k) expm = ih * expm;
    }
    Eigen::MatrixXcd gate = kron(factor.P, expm);
    if (mult == 0) {
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Identity(factor.P.rows(),
                                                           factor.P.cols()) -
                                factor.P;
        gate += kron(comp, Eigen::MatrixXcd::Identity(factor.H.rows(),
                                                      factor.H.cols()));
    }
    return gate;
}

Eigen::MatrixXcd product_with_insertions(const ParametrizedCircuit &circuit,
                                         std::span<const double> x,
                                         std::span<const int> alpha) {
    Eigen::MatrixXcd u = circuit.U0;
    for (std::size_t j = 0; j < circuit.factors.size(); ++j) {
        int mult = alpha.empty() ? 0 : alpha[j];
        u = u * gate_matrix(circuit.factors[j], x[j], mult) *
            circuit.factors[j].U;
    }
    return u;
}

void check_point(const ParametrizedCircuit &circuit,
                 std::span<const double> x) {
    if (static_cast<int>(x.size()) != circuit.parameter_count())
        throw ConfigError("circuits: expected one parameter per factor");
    for (double v : x)
        if (!std::isfinite(v))
            throw DomainError("circuits: parameter not finite");
}

void check_projector(const Eigen::MatrixXcd &pi, double tol,
                     const char *what) {
    if (pi.rows() != pi.cols())
        throw ConfigError(std::string(what) + ": projector not square");
    if (!is_hermitian(pi, tol))
        throw ValidationError(std::string(what) + ": projector not Hermitian");
    if ((pi * pi - pi).cwiseAbs().maxCoeff() > tol)
        throw ValidationError(std::string(what) + ": projector not idempotent");
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) /
                                      static_cast<std::uint64_t>(i);
    return r;
}

/// Householder reflection taking |0> to the given real unit vector.
Eigen::MatrixXcd loader_unitary(const Eigen::VectorXd &w) {
    Eigen::Index n = w.size();
    Eigen::VectorXd v = -w;
    v(0) += 1.0;
    double vv = v.squaredNorm();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    if (vv > 1e-30) p -= (2.0 / vv) * v * v.transpose();
    return p.cast<cplx>();
}

} // namespace

Eigen::Matrix2cd pauli_matrix(char label) {
    Eigen::Matrix2cd m;
    switch (label) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default:
        throw DomainError(std::string("circuits: unknown Pauli label '") +
                          label + "'");
    }
    return m;
}

Eigen::MatrixXcd pauli_string(const std::string &labels) {
    if (labels.empty())
        throw DomainError("circuits: empty Pauli string");
    if (labels.size() > 6)
        throw DomainError("circuits: Pauli string beyond 6 qubits");
    Eigen::MatrixXcd out = pauli_matrix(labels[0]);
    for (std::size_t i = 1; i < labels.size(); ++i)
        out = kron(out, pauli_matrix(labels[i]));
    return out;
}

double operator_norm(const Eigen::MatrixXcd &a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    return svd.singularValues()(0);
}

void ParametrizedCircuit::validate() const {
    if (U0.rows() == 0 || U0.rows() != U0.cols())
        throw ConfigError("circuit: U0 must be square and nonempty");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw ConfigError("circuit: gamma must be finite and nonnegative");
    if (operator_norm(U0) > 1.0 + kNormSlack)
        throw ValidationError("circuit: U0 is not a contraction");
    for (std::size_t j = 0; j < factors.size(); ++j) {
        const CircuitFactor &f = factors[j];
        std::ostringstream tag;
        tag << "circuit factor " << j;
        if (f.H.rows() == 0 || f.H.rows() != f.H.cols())
            throw ConfigError(tag.str() + ": generator must be square");
        if (f.dim() != dim())
            throw ConfigError(tag.str() + ": dimension mismatch");
        if (f.U.rows() != dim() || f.U.cols() != dim())
            throw ConfigError(tag.str() + ": fixed gate dimension mismatch");
        if (!is_hermitian(f.H, kHermTol))
            throw ValidationError(tag.str() + ": generator not Hermitian");
        if (operator_norm(f.H) > gamma + kNormSlack)
            throw ValidationError(tag.str() + ": generator norm exceeds gamma");
        check_projector(f.P, kProjTol, tag.str().c_str());
        if (operator_norm(f.U) > 1.0 + kNormSlack)
            throw ValidationError(tag.str() + ": fixed gate not a contraction");
    }
}

ParametrizedCircuit product_ansatz(
    const std::vector<Eigen::MatrixXcd> &generators, double gamma) {
    if (generators.empty())
        throw ConfigError("product_ansatz: need at least one generator");
    Eigen::Index dim = generators.front().rows();
    ParametrizedCircuit circuit;
    circuit.U0 = Eigen::MatrixXcd::Identity(dim, dim);
    circuit.gamma = gamma;
    for (const Eigen::MatrixXcd &g : generators) {
        CircuitFactor f;
        f.P = Eigen::MatrixXcd::Identity(1, 1);
        f.H = -g;
        f.U = Eigen::MatrixXcd::Identity(dim, dim);
        circuit.factors.push_back(std::move(f));
    }
    circuit.validate();
    return circuit;
}

Eigen::MatrixXcd build_unitary(const ParametrizedCircuit &circuit,
                               std::span<const double> x) {
    check_point(circuit, x);
    return product_with_insertions(circuit, x, {});
}

Eigen::MatrixXcd circuit_partial_derivative(const ParametrizedCircuit &circuit,
                                            std::span<const double> x,
                                            std::span<const int> alpha) {
    check_point(circuit, x);
    if (circuit.dim() > kMaxDerivativeDim)
        throw DomainError("circuit derivative: dimension beyond 64");
    if (alpha.size() != x.size())
        throw ConfigError("circuit derivative: one multiplicity per parameter");
    int order = 0;
    for (int a : alpha) {
        if (a < 0)
            throw DomainError("circuit derivative: negative multiplicity");
        order += a;
    }
    if (order > kMaxDerivativeOrder)
        throw DomainError("circuit derivative: order beyond 6");
    Eigen::MatrixXcd du = product_with_insertions(circuit, x, alpha);
    double bound = std::pow(circuit.gamma, order);
    if (operator_norm(du) > bound * (1.0 + 1e-9) + 1e-12)
        throw InternalError("circuit derivative: norm exceeds gamma^k");
    return du;
}

double circuit_probability(const ParametrizedCircuit &circuit,
                           std::span<const double> x,
                           const Eigen::MatrixXcd &projector) {
    check_projector(projector, kProjTol, "circuit_probability");
    if (projector.rows() != circuit.dim())
        throw ConfigError("circuit_probability: projector dimension mismatch");
    Eigen::MatrixXcd u = build_unitary(circuit, x);
    Eigen::VectorXcd psi = projector * u.col(0);
    double p = psi.squaredNorm();
    if (p < -1e-12 || p > 1.0 + 1e-9)
        throw InternalError("circuit_probability: value escaped [0,1]");
    return std::min(std::max(p, 0.0), 1.0);
}

ObjectiveDerivative objective_derivative_bound_check(
    const ParametrizedCircuit &circuit, std::span<const double> x,
    std::span<const int> alpha, const Eigen::MatrixXcd &projector) {
    check_projector(projector, kProjTol, "objective derivative");
    if (projector.rows() != circuit.dim())
        throw ConfigError("objective derivative: projector dimension mismatch");
    check_point(circuit, x);
    if (alpha.size() != x.size())
        throw ConfigError("objective derivative: one multiplicity per parameter");
    int order = 0;
    for (int a : alpha) {
        if (a < 0)
            throw DomainError("objective derivative: negative multiplicity");
        order += a;
    }
    if (order > kMaxDerivativeOrder)
        throw DomainError("objective derivative: order beyond 6");

    // d_alpha <0|U^dag Pi U|0> splits across the two copies of U; the
    // subset expansion collapses to a binomial sum over sub-multiplicities.
    std::size_t d = alpha.size();
    std::vector<int> beta(d, 0), rest(d, 0);
    cplx total(0.0, 0.0);
    bool done = false;
    while (!done) {
        double coef = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            rest[i] = alpha[i] - beta[i];
            coef *= static_cast<double>(binomial(alpha[i], beta[i]));
        }
        Eigen::VectorXcd left =
            product_with_insertions(circuit, x, beta).col(0);
        Eigen::VectorXcd right =
            product_with_insertions(circuit, x, rest).col(0);
        total += coef * (left.adjoint() * (projector * right))(0, 0);
        done = true;
        for (std::size_t i = 0; i < d; ++i) {
            if (beta[i] < alpha[i]) {
                ++beta[i];
                for (std::size_t k = 0; k < i; ++k) beta[k] = 0;
                done = false;
                break;
            }
        }
    }
    if (std::abs(total.imag()) > 1e-9)
        throw InternalError("objective derivative: non-real value");

    ObjectiveDerivative result;
    result.value = total.real();
    result.bound = std::pow(2.0 * circuit.gamma, order);
    result.holds =
        std::abs(result.value) <= result.bound * (1.0 + 1e-9) + 1e-12;
    if (!result.holds)
        throw InternalError("objective derivative: bound (2 gamma)^k violated");
    return result;
}

Eigen::MatrixXcd VqeInstance::hamiltonian() const {
    if (terms.empty())
        throw ConfigError("vqe instance: no terms");
    Eigen::MatrixXcd h =
        Eigen::MatrixXcd::Zero(terms[0].rows(), terms[0].cols());
    for (std::size_t j = 0; j < terms.size(); ++j) h += weights[j] * terms[j];
    return h;
}

void VqeInstance::validate() const {
    if (weights.empty() || weights.size() != terms.size())
        throw ConfigError("vqe instance: need one weight per term");
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw ValidationError("vqe instance: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("vqe instance: weights must sum to 1");
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const Eigen::MatrixXcd &t = terms[j];
        if (t.rows() != system_dim() || t.cols() != system_dim())
            throw ConfigError("vqe instance: term dimension mismatch");
        if (!is_hermitian(t, kHermTol))
            throw ValidationError("vqe instance: term not Hermitian");
        Eigen::MatrixXcd gram = t.adjoint() * t;
        if ((gram - Eigen::MatrixXcd::Identity(t.rows(), t.cols()))
                .cwiseAbs()
                .maxCoeff() > kHermTol)
            throw ValidationError("vqe instance: term not unitary");
    }
    ansatz.validate();
}

VqeInstance VqeInstance::from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("vqe instance: bad JSON: ") + e.what());
    }
    VqeInstance inst;
    try {
        inst.weights = j.at("weights").get<std::vector<double>>();
        inst.term_labels = j.at("terms").get<std::vector<std::string>>();
        for (const std::string &s : inst.term_labels)
            inst.terms.push_back(pauli_string(s));
        const nlohmann::json &ans = j.at("ansatz");
        inst.generator_labels =
            ans.at("generators").get<std::vector<std::string>>();
        inst.gamma = j.value("gamma", 1.0);
        if (ans.contains("projectors") && !ans.at("projectors").is_null()) {
            for (const nlohmann::json &entry : ans.at("projectors")) {
                if (entry.is_null())
                    inst.projector_masks.emplace_back();
                else
                    inst.projector_masks.push_back(
                        entry.get<std::vector<int>>());
            }
            if (inst.projector_masks.size() != inst.generator_labels.size())
                throw ConfigError(
                    "vqe instance: one projector entry per generator");
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("vqe instance: bad field: ") + e.what());
    }
    if (inst.generator_labels.empty())
        throw ConfigError("vqe instance: ansatz needs generators");

    // Tuned ansatz convention is prod_j e^(-i H_j x_j); the factor model
    // exponentiates +i x H, so generators enter negated.
    ParametrizedCircuit circuit;
    circuit.gamma = inst.gamma;
    std::int64_t dim = 0;
    for (std::size_t jf = 0; jf < inst.generator_labels.size(); ++jf) {
        CircuitFactor f;
        f.H = -pauli_string(inst.generator_labels[jf]);
        if (jf < inst.projector_masks.size() &&
            !inst.projector_masks[jf].empty()) {
            const std::vector<int> &mask = inst.projector_masks[jf];
            Eigen::VectorXcd diag(static_cast<Eigen::Index>(mask.size()));
            for (std::size_t i = 0; i < mask.size(); ++i) {
                if (mask[i] != 0 && mask[i] != 1)
                    throw ConfigError("vqe instance: projector mask not 0/1");
                diag(static_cast<Eigen::Index>(i)) = mask[i];
            }
            f.P = diag.asDiagonal();
        } else {
            f.P = Eigen::MatrixXcd::Identity(1, 1);
        }
        std::int64_t fdim = f.P.rows() * f.H.rows();
        if (dim == 0) dim = fdim;
        if (fdim != dim)
            throw ConfigError("vqe instance: ansatz factor dimensions differ");
        f.U = Eigen::MatrixXcd::Identity(dim, dim);
        circuit.factors.push_back(std::move(f));
    }
    circuit.U0 = Eigen::MatrixXcd::Identity(dim, dim);
    inst.ansatz = std::move(circuit);
    inst.validate();
    return inst;
}

std::string VqeInstance::to_json() const {
    if (term_labels.size() != terms.size())
        throw ConfigError("vqe instance: custom terms are not serializable");
    if (generator_labels.size() != ansatz.factors.size())
        throw ConfigError("vqe instance: custom ansatz is not serializable");
    nlohmann::json j;
    j["weights"] = weights;
    j["terms"] = term_labels;
    j["ansatz"]["generators"] = generator_labels;
    if (!projector_masks.empty()) {
        nlohmann::json masks = nlohmann::json::array();
        for (const std::vector<int> &m : projector_masks) {
            if (m.empty())
                masks.push_back(nullptr);
            else
                masks.push_back(m);
        }
        j["ansatz"]["projectors"] = masks;
    }
    j["gamma"] = gamma;
    return j.dump(2);
}

VqeObjective::VqeObjective(VqeInstance instance)
    : instance_(std::move(instance)) {
    instance_.validate();
    std::size_t m = instance_.weights.size();
    select_dim_ = 1;
    while (select_dim_ < static_cast<std::int64_t>(m)) select_dim_ *= 2;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(select_dim_);
    for (std::size_t jt = 0; jt < m; ++jt)
        w(static_cast<Eigen::Index>(jt)) = std::sqrt(instance_.weights[jt]);
    prepare_ = loader_unitary(w);

    std::int64_t ds = instance_.system_dim();
    select_ = Eigen::MatrixXcd::Zero(ds * select_dim_, ds * select_dim_);
    for (std::int64_t a = 0; a < select_dim_; ++a) {
        Eigen::MatrixXcd block =
            a < static_cast<std::int64_t>(m)
                ? instance_.terms[static_cast<std::size_t>(a)]
                : Eigen::MatrixXcd::Identity(ds, ds);
        for (std::int64_t s = 0; s < ds; ++s)
            for (std::int64_t t = 0; t < ds; ++t)
                select_(s * select_dim_ + a, t * select_dim_ + a) =
                    block(s, t);
    }
}

std::int64_t VqeObjective::circuit_dim() const {
    return instance_.system_dim() * select_dim_ * 2;
}

Eigen::MatrixXcd VqeObjective::circuit_unitary(
    std::span<const double> x) const {
    std::int64_t ds = instance_.system_dim();
    std::int64_t da = select_dim_;
    Eigen::MatrixXcd h2(2, 2);
    double s = 1.0 / std::sqrt(2.0);
    h2 << s, s, s, -s;

    Eigen::MatrixXcd tuned =
        kron(build_unitary(instance_.ansatz, x),
             Eigen::MatrixXcd::Identity(da * 2, da * 2));
    Eigen::MatrixXcd flag_h =
        kron(Eigen::MatrixXcd::Identity(ds * da, ds * da), h2);
    Eigen::MatrixXcd load =
        kron(kron(Eigen::MatrixXcd::Identity(ds, ds), prepare_),
             Eigen::MatrixXcd::Identity(2, 2));
    Eigen::Matrix2cd p0 = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd p1 = Eigen::Matrix2cd::Zero();
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    Eigen::MatrixXcd controlled =
        kron(select_, p1) +
        kron(Eigen::MatrixXcd::Identity(ds * da, ds * da), p0);

    return flag_h * load.adjoint() * controlled * load * flag_h * tuned;
}

double VqeObjective::probability(std::span<const double> x) const {
    Eigen::VectorXcd psi = circuit_unitary(x).col(0);
    double p = 0.0;
    for (Eigen::Index i = 1; i < psi.size(); i += 2) p += std::norm(psi(i));
    return p;
}

double VqeObjective::expectation(std::span<const double> x) const {
    Eigen::VectorXcd psi = build_unitary(instance_.ansatz, x).col(0);
    return (psi.adjoint() * (instance_.hamiltonian() * psi))(0, 0).real();
}

std::vector<double> VqeObjective::probability_gradient(
    std::span<const double> x) const {
    Eigen::MatrixXcd h = instance_.hamiltonian();
    Eigen::VectorXcd psi = build_unitary(instance_.ansatz, x).col(0);
    int d = instance_.parameter_count();
    std::vector<double> grad(static_cast<std::size_t>(d), 0.0);
    std::vector<int> alpha(static_cast<std::size_t>(d), 0);
    for (int j = 0; j < d; ++j) {
        alpha[static_cast<std::size_t>(j)] = 1;
        Eigen::VectorXcd dpsi =
            circuit_partial_derivative(instance_.ansatz, x, alpha).col(0);
        alpha[static_cast<std::size_t>(j)] = 0;
        // d_j p = -d_j <H>/2 = -Re <d_j psi|H|psi>.
        grad[static_cast<std::size_t>(j)] =
            -(dpsi.adjoint() * (h * psi))(0, 0).real();
    }
    return grad;
}

VqeObjective vqe_objective_oracle(const VqeInstance &instance) {
    VqeObjective objective(instance);
    int d = instance.parameter_count();
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    constexpr double kPi = 3.14159265358979323846;
    for (int t = 0; t < 16; ++t) {
        for (int j = 0; j < d; ++j)
            x[static_cast<std::size_t>(j)] =
                -kPi + 2.0 * kPi * ((t + j) % 16) / 16.0;
        double p = objective.probability(x);
        double e = objective.expectation(x);
        if (std::abs(p - (0.5 - 0.5 * e)) > kIdentityTol)
            throw InternalError(
                "vqe objective: indicator probability deviates from "
                "1/2 - <H>/2");
    }
    return objective;
}

VqeGradientResult vqe_gradient(const VqeInstance &instance,
                               std::span<const double> x, double eps,
                               double rho, std::uint64_t seed,
                               oracles::Ledger ledger, double c) {
    int d = instance.parameter_count();
    if (d < 1 || d > 3)
        throw ConfigError("vqe_gradient: supports 1 to 3 parameters");
    if (static_cast<int>(x.size()) != d)
        throw ConfigError("vqe_gradient: expected one coordinate per parameter");

    VqeObjective objective = vqe_objective_oracle(instance);
    grad::PointFn f = [&objective](std::span<const double> pt) {
        return objective.probability(pt);
    };
    std::vector<double> truth = objective.probability_gradient(x);

    VqeGradientResult out;
    out.report =
        grad::estimate_gradient_smooth(f, x, d, eps, rho, c, seed, ledger,
                                       &truth);

    // Each fractional phase unit is implemented as a probability-to-phase
    // conversion. The measurement round tolerates 1/21 rad of phase error
    // per invocation, so the per-unit accuracy splits that budget across
    // the invocation's units; one conversion costs 20 M_c probability
    // queries at truncation order M_c.
    std::uint64_t units = out.report.params.units_per_invocation;
    out.delta = (1.0 / 21.0) / static_cast<double>(units);
    out.conversion_order = oracles::lcu_order_for(out.delta / 10.0);
    out.probability_queries =
        out.report.phase_query_units *
        static_cast<std::uint64_t>(20 * out.conversion_order);
    if (ledger) ledger->charge_probability(out.probability_queries);
    out.report.probability_queries = out.probability_queries;
    return out;
}

} // namespace qgrad::circuits
