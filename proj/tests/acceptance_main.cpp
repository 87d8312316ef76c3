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

// Release gate for the library: twelve end-to-end checks, one printed
// pass/fail line each. Every tolerance is pinned here; a FAIL line and a
// nonzero exit mean the build must not ship.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgrad/bounds.hpp"
#include "qgrad/circuits.hpp"
#include "qgrad/gradient.hpp"
#include "qgrad/grid.hpp"
#include "qgrad/harness.hpp"
#include "qgrad/oracles.hpp"
#include "qgrad/rng.hpp"
#include "qgrad/stencil.hpp"

using namespace qgrad;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kBaseSeed = 20260312;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *pattern, ...) {
    char buf[256];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return std::string(buf);
}

std::uint64_t seed_for(const std::string &tag) {
    return combine_seed(kBaseSeed, hash_string("acceptance-" + tag));
}

// ---------------------------------------------------------------------
// 1. Central differences recover polynomial derivatives exactly.

Outcome criterion_stencil_exact() {
    std::mt19937_64 gen(seed_for("stencil-exact"));
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(uniform_index(gen, 4));
        const int degree = 2 * m;
        std::vector<double> coef(static_cast<std::size_t>(degree) + 1);
        for (double &c : coef) c = uniform_in(gen, -1.0, 1.0);
        // Keep the true derivative away from zero so the relative
        // comparison is meaningful.
        coef[1] = (uniform01(gen) < 0.5 ? -1.0 : 1.0) *
                  uniform_in(gen, 0.5, 1.5);
        const double delta = uniform_in(gen, 0.05, 0.5);

        const auto poly = [&](double t) {
            double acc = 0.0;
            for (std::size_t k = coef.size(); k-- > 0;)
                acc = acc * t + coef[k];
            return acc;
        };
        const auto scheme = stencil::central_coefficients(m);
        const double est =
            stencil::apply_scheme_1d(poly, scheme, delta) / delta;
        const double rel = std::abs(est - coef[1]) /
                           std::max(1.0, std::abs(coef[1]));
        worst = std::max(worst, rel);
    }
    return {worst <= 1e-9, fmt("worst relative error %.3e over 50 random "
                               "polynomials (tolerance 1e-9)",
                               worst)};
}

// ---------------------------------------------------------------------
// 2. The truncation error of the degree-2m scheme on sin stays under the
// e^(-m/2) delta^(2m+1) envelope. The residual is accumulated through the
// power sums of the coefficients so that sub-1e-18 envelopes remain
// resolvable (direct evaluation drowns them in rounding noise).

Outcome criterion_stencil_envelope() {
    int violations = 0;
    double worst_ratio = 0.0;
    for (int m = 1; m <= 6; ++m) {
        const auto scheme = stencil::central_coefficients(m);
        for (const double delta : {0.05, 0.1, 0.25, 0.5}) {
            // sin(l delta) expanded termwise: the scheme reproduces the
            // k = 1 term and annihilates every other power below 2m + 1,
            // so the residual is the tail sum over odd k >= 2m + 1 of
            // sign_k delta^k / k! * sum_l a_l l^k.
            double residual = 0.0;
            double sign = (m % 2 == 0) ? 1.0 : -1.0;
            for (int k = 2 * m + 1; k <= 211; k += 2) {
                double power_sum = 0.0;
                for (int l = 1; l <= m; ++l)
                    power_sum += 2.0 * scheme.at(l) * std::pow(l, k);
                double fact = 1.0;
                for (int i = 2; i <= k; ++i) fact *= i;
                const double term =
                    sign * std::pow(delta, k) / fact * power_sum;
                residual -= term;
                sign = -sign;
                if (std::abs(term) < 1e-300) break;
            }
            const double bound = stencil::lagrange_error_bound(m, 1.0, delta);
            worst_ratio = std::max(worst_ratio, std::abs(residual) / bound);
            if (std::abs(residual) > bound) ++violations;
        }
    }
    return {violations == 0,
            fmt("%d violations over 24 (m, delta) pairs, worst "
                "residual/bound ratio %.3f",
                violations, worst_ratio)};
}

// ---------------------------------------------------------------------
// 3. Coefficient mass stays under log(m) + 1 for every order up to 10^4,
// and the weighted power sums stay under their analytic envelope.

Outcome criterion_coefficient_mass() {
    for (int m = 1; m <= 10000; ++m) {
        const auto r = stencil::coefficient_l1(m);
        if (!r.holds || r.sum > r.bound)
            return {false, fmt("l1 envelope broken at m = %d", m)};
    }
    int pairs = 0;
    for (int m = 1; m <= 6; ++m) {
        for (int k = 2 * m; k <= 14; ++k) {
            const auto p = stencil::coefficient_power_sum(m, k);
            if (!p.holds)
                return {false,
                        fmt("power-sum envelope broken at m = %d, k = %d", m,
                            k)};
            ++pairs;
        }
    }
    return {true, fmt("l1 bound holds for m = 1..10000; power-sum bound "
                      "holds for %d (m, k) pairs",
                      pairs)};
}

// ---------------------------------------------------------------------
// 4. An exact affine phase concentrates all output mass on its slope.

Outcome criterion_exact_affine() {
    const int n = 4;
    const int d = 2;
    const double N = std::ldexp(1.0, n);
    const std::vector<double> g{3.0 / 32.0, -5.0 / 32.0};

    const auto phase = [&](std::span<const double> x) {
        double f = 0.41; // constant offsets only change a global phase
        for (int i = 0; i < d; ++i)
            f += g[static_cast<std::size_t>(i)] *
                 x[static_cast<std::size_t>(i)];
        return 2.0 * kPi * N * f;
    };
    const auto dist = grad::jordan_output_distribution(phase, d, n);

    std::uint64_t flat = 0;
    for (int i = 0; i < d; ++i)
        flat = (flat << n) | static_cast<std::uint64_t>(grid::nearest_index(
                                 n, g[static_cast<std::size_t>(i)]));
    double total = 0.0;
    for (double w : dist) total += w;
    const double mass = dist[flat];
    const bool pass = std::abs(mass - 1.0) <= 1e-9 &&
                      std::abs(total - 1.0) <= 1e-9;
    return {pass, fmt("mass %.12f at the slope label (target 1 +- 1e-9), "
                      "total %.12f",
                      mass, total)};
}

// ---------------------------------------------------------------------
// 5. Bounded phase perturbations keep each coordinate's failure mass
// under 1/3.

double signed_noise(std::uint64_t salt, std::uint64_t flat) {
    const std::uint64_t word =
        splitmix64(salt + flat * 0x9e3779b97f4a7c15ULL);
    return 2.0 * (static_cast<double>(word >> 11) * 0x1.0p-53) - 1.0;
}

double coord_of_flat(int n, int d, std::uint64_t flat, int i) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    const int shift = (d - 1 - i) * n;
    return grid::label(n, static_cast<std::int64_t>((flat >> shift) & mask));
}

Outcome criterion_perturbed_affine() {
    const std::uint64_t base = seed_for("perturbed");
    const struct {
        int n;
        int d;
    } shapes[] = {{4, 1}, {4, 2}, {5, 1}, {5, 2}};

    int perturbations = 0;
    int checks = 0;
    int violations = 0;
    double worst = 0.0;
    for (const auto &shape : shapes) {
        const int n = shape.n;
        const int d = shape.d;
        const double N = std::ldexp(1.0, n);
        const double bound = 1.0 / (42.0 * kPi * N);
        for (int trial = 0; trial < 5; ++trial) {
            std::mt19937_64 gen(
                combine_seed(base, 1000ULL * static_cast<std::uint64_t>(n) +
                                       10ULL * static_cast<std::uint64_t>(d) +
                                       static_cast<std::uint64_t>(trial)));
            std::vector<double> g(static_cast<std::size_t>(d));
            for (double &gi : g) gi = uniform_in(gen, -1.0 / 3.0, 1.0 / 3.0);
            const double c0 = uniform_in(gen, -1.0, 1.0);
            const std::uint64_t salt = gen();

            const auto phase = [&](std::span<const double> x) {
                double f = c0;
                std::uint64_t flat = 0;
                for (int i = 0; i < d; ++i) {
                    f += g[static_cast<std::size_t>(i)] *
                         x[static_cast<std::size_t>(i)];
                    flat = (flat << n) |
                           static_cast<std::uint64_t>(grid::nearest_index(
                               n, x[static_cast<std::size_t>(i)]));
                }
                f += bound * signed_noise(salt, flat);
                return 2.0 * kPi * N * f;
            };
            const auto dist = grad::jordan_output_distribution(phase, d, n);
            ++perturbations;
            for (int i = 0; i < d; ++i) {
                double fail = 0.0;
                for (std::uint64_t f = 0; f < dist.size(); ++f) {
                    if (std::abs(coord_of_flat(n, d, f, i) -
                                 g[static_cast<std::size_t>(i)]) > 4.0 / N)
                        fail += dist[f];
                }
                worst = std::max(worst, fail);
                ++checks;
                if (fail > 1.0 / 3.0 + 1e-12) ++violations;
            }
        }
    }
    return {violations == 0 && perturbations == 20,
            fmt("%d perturbations, %d coordinate checks, worst failure "
                "mass %.4f (cap 1/3)",
                perturbations, checks, worst)};
}

// ---------------------------------------------------------------------
// 6. Probability-to-phase conversion meets its accuracy, query, and
// truncation budgets.

Outcome criterion_conversion() {
    std::mt19937_64 gen(seed_for("conversion"));
    for (int M = 1; M <= 12; ++M) {
        const auto check = oracles::lcu_truncation_check(M);
        if (!check.holds || check.max_deviation > check.bound)
            return {false, fmt("series truncation exceeds 1/M! at M = %d",
                               M)};
    }
    std::string detail = "per-eps (deviation, queries, cap):";
    for (const double eps : {1e-1, 1e-2, 1e-3}) {
        std::vector<double> p(4);
        for (double &v : p) v = uniform_in(gen, 0.05, 0.95);
        auto ledger = oracles::make_ledger();
        const auto oracle = oracles::build_probability_oracle(p, 1, ledger);
        const auto conv = oracles::probability_to_phase(oracle, eps);
        const double cap = 40.0 * std::log2(1.0 / eps);
        detail += fmt(" [%.0e: %.2e, %llu, %.0f]", eps, conv.max_deviation,
                      static_cast<unsigned long long>(
                          conv.probability_queries),
                      cap);
        if (conv.max_deviation > eps)
            return {false, fmt("deviation %.3e exceeds eps %.0e",
                               conv.max_deviation, eps)};
        if (static_cast<double>(conv.probability_queries) > cap)
            return {false, fmt("%llu probability queries exceed cap %.1f "
                               "at eps %.0e",
                               static_cast<unsigned long long>(
                                   conv.probability_queries),
                               cap, eps)};
    }
    return {true, detail};
}

// ---------------------------------------------------------------------
// 7. Oblivious amplification stays within ten epsilon of the target map.

Outcome criterion_amplification() {
    std::mt19937_64 gen(seed_for("amplification"));
    const double eps_values[] = {0.0, 1e-3, 1e-2};
    double worst_margin = -1e300;
    for (int trial = 0; trial < 100; ++trial) {
        const double eps = eps_values[trial % 3];
        const int k = 1 + trial % 2;
        const int blocks = 1 + static_cast<int>(uniform_index(gen, 3));
        const double s0 = std::sin(kPi / (2.0 * (2 * k + 1)));

        // One rotation block per system state with amplitude
        // s0 (1 + eps u), |u| <= 1, flagged rows first within each block.
        const int dim = 2 * blocks;
        Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(dim, dim);
        std::vector<bool> mask(static_cast<std::size_t>(dim), false);
        for (int x = 0; x < blocks; ++x) {
            const double u = uniform_in(gen, -1.0, 1.0);
            const double s = s0 * (1.0 + eps * u);
            const double c = std::sqrt(1.0 - s * s);
            W(2 * x, 2 * x) = s;
            W(2 * x + 1, 2 * x) = c;
            W(2 * x, 2 * x + 1) = -c;
            W(2 * x + 1, 2 * x + 1) = s;
            mask[static_cast<std::size_t>(2 * x)] = true;
        }
        const Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(dim, dim);
        const auto res =
            oracles::oblivious_amplitude_amplify(W, mask, mask, k, U, eps);
        const double cap = 10.0 * eps + 1e-9;
        worst_margin = std::max(worst_margin, res.max_deviation - cap);
        if (res.max_deviation > cap)
            return {false,
                    fmt("deviation %.3e exceeds 10 eps + 1e-9 at trial %d "
                        "(eps %.0e, k %d)",
                        res.max_deviation, trial, eps, k)};
    }
    return {true, fmt("100 instances pass; worst deviation sits %.3e "
                      "below its cap",
                      -worst_margin)};
}

// ---------------------------------------------------------------------
// 8. Simulating the outcome distribution reproduces e^(i t p(x)).

Outcome criterion_distribution_phases() {
    std::mt19937_64 gen(seed_for("distribution"));
    const double eps = 1e-2;
    std::string detail = "per-t (certified, diagonal):";
    for (const double t : {1.0, 3.7}) {
        const double p0 = uniform_in(gen, 0.1, 0.9);
        Eigen::MatrixXcd U(2, 2);
        const double a = std::sqrt(p0);
        const double b = std::sqrt(1.0 - p0);
        U << a, -b, b, a;
        auto ledger = oracles::make_ledger();
        const auto sim = oracles::distribution_hamiltonian_simulation(
            U, 2, 1, t, eps, ledger);
        // Independent check against the exact diagonal on the anchor
        // basis states.
        const std::int64_t stride = sim.O.rows() / 2;
        double diag_dev = 0.0;
        for (std::int64_t x = 0; x < 2; ++x) {
            const std::complex<double> expect{std::cos(t * sim.p[static_cast<
                                                  std::size_t>(x)]),
                                              std::sin(t * sim.p[static_cast<
                                                  std::size_t>(x)])};
            diag_dev = std::max(
                diag_dev, std::abs(sim.O(x * stride, x * stride) - expect));
        }
        detail += fmt(" [t=%.1f: %.2e, %.2e]", t, sim.max_deviation,
                      diag_dev);
        if (sim.max_deviation > eps || diag_dev > eps)
            return {false, detail + " exceeds eps 1e-2"};
    }
    return {true, detail};
}

// ---------------------------------------------------------------------
// 9. The end-to-end smooth gradient pipeline hits its success rate and
// its query-cost scaling separates from classical sampling.

Outcome criterion_smooth_gradient() {
    const std::uint64_t base = seed_for("smooth");
    const double eps = 0.05;
    const double rho = 1.0 / 3.0;
    const auto f = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return std::sin(s);
    };

    int good = 0;
    int jobs = 0;
    for (int d = 1; d <= 3; ++d) {
        const std::vector<double> y(static_cast<std::size_t>(d), 0.0);
        const std::vector<double> truth(static_cast<std::size_t>(d), 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const auto report = grad::estimate_gradient_smooth(
                f, y, d, eps, rho, 1.0,
                combine_seed(base, 1000ULL * static_cast<std::uint64_t>(d) +
                                       static_cast<std::uint64_t>(trial)),
                nullptr, &truth);
            ++jobs;
            if (report.err_inf && *report.err_inf <= eps) ++good;
        }
    }
    if (3 * good < 2 * jobs)
        return {false, fmt("only %d of %d jobs within eps (need 2/3)", good,
                           jobs)};

    harness::ExperimentConfig cfg;
    cfg.methods = {"improved-smooth", "classical-sampling"};
    cfg.d_values = {2};
    cfg.eps_values = {0.2, 0.1, 0.05, 0.025};
    cfg.trials = 1;
    cfg.seed = kBaseSeed;
    const auto records = harness::run_scaling_experiment(cfg);
    std::vector<double> inv_eps{5.0, 10.0, 20.0, 40.0};
    std::vector<double> smooth;
    std::vector<double> classical;
    for (const auto &r : records) {
        if (r.status != "ok")
            return {false, "sweep cell failed: " + r.status};
        if (r.method == "improved-smooth")
            smooth.push_back(static_cast<double>(r.query_cost));
        else
            classical.push_back(static_cast<double>(r.query_cost));
    }
    const double s_slope = harness::loglog_slope(inv_eps, smooth);
    const double c_slope = harness::loglog_slope(inv_eps, classical);
    const bool slopes_ok = s_slope >= 0.8 && s_slope <= 1.3 &&
                           c_slope >= 1.8 && c_slope <= 2.2;
    return {slopes_ok,
            fmt("%d/%d jobs within eps; cost slopes %.3f (window "
                "[0.8, 1.3]) vs classical %.3f ([1.8, 2.2])",
                good, jobs, s_slope, c_slope)};
}

// ---------------------------------------------------------------------
// 10. The single-parameter rotation instance recovers sin(2x) and the
// flag probability matches the expectation identity everywhere.

Outcome criterion_vqe_gradient() {
    const auto instance = circuits::VqeInstance::from_json(R"({
        "weights": [1.0],
        "terms": ["Z"],
        "ansatz": {"generators": ["Y"]},
        "gamma": 1.0
    })");
    const circuits::VqeObjective objective(instance);
    double worst_identity = 0.0;
    for (int i = 0; i < 16; ++i) {
        const double x = -kPi + 2.0 * kPi * i / 16.0;
        const std::vector<double> at{x};
        const double p = objective.probability(at);
        const double via_expectation = 0.5 - 0.5 * objective.expectation(at);
        const double closed_form = std::sin(x) * std::sin(x);
        worst_identity = std::max(worst_identity,
                                  std::abs(p - via_expectation));
        worst_identity = std::max(worst_identity, std::abs(p - closed_form));
    }
    if (worst_identity > 1e-10)
        return {false, fmt("flag-probability identity off by %.3e "
                           "(tolerance 1e-10)",
                           worst_identity)};

    const std::uint64_t base = seed_for("vqe");
    const double truth = std::sqrt(2.0) / 2.0;
    const std::vector<double> at{kPi / 8.0};
    int good = 0;
    const int runs = 30;
    for (int trial = 0; trial < runs; ++trial) {
        const auto res = circuits::vqe_gradient(
            instance, at, 0.05, 1.0 / 3.0,
            combine_seed(base, static_cast<std::uint64_t>(trial)));
        if (std::abs(res.report.estimate[0] - truth) <= 0.05) ++good;
    }
    return {3 * good >= 2 * runs,
            fmt("gradient within 0.05 of sqrt(2)/2 in %d/%d runs; "
                "identity deviation %.2e",
                good, runs, worst_identity)};
}

// ---------------------------------------------------------------------
// 11. Derivative norms of random parametrized circuits respect the
// gamma^|alpha| and (2 gamma)^|alpha| envelopes.

Eigen::MatrixXcd random_unitary(std::mt19937_64 &gen, Eigen::Index n) {
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = std::complex<double>(gaussian(gen), gaussian(gen));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    return qr.householderQ();
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64 &gen, Eigen::Index n,
                                  double norm) {
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = std::complex<double>(gaussian(gen), gaussian(gen));
    Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    const double current = circuits::operator_norm(h);
    if (current > 0.0) h *= norm / current;
    return h;
}

Outcome criterion_circuit_envelopes() {
    std::mt19937_64 gen(seed_for("envelopes"));
    int circuits_checked = 0;
    int derivative_checks = 0;
    double worst_unitary_ratio = 0.0;
    double worst_objective_ratio = 0.0;
    for (const double gamma : {0.5, 1.0}) {
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::Index dim =
                (uniform01(gen) < 0.5) ? 2 : 4;
            const int d = 1 + static_cast<int>(uniform_index(gen, 3));
            circuits::ParametrizedCircuit circuit;
            circuit.U0 = random_unitary(gen, dim);
            circuit.gamma = gamma;
            for (int j = 0; j < d; ++j) {
                circuits::CircuitFactor factor;
                if (uniform01(gen) < 0.5 && dim % 2 == 0) {
                    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
                    p(0, 0) = 1.0;
                    factor.P = p;
                    factor.H = random_hermitian(gen, dim / 2, gamma);
                } else {
                    factor.P = Eigen::MatrixXcd::Identity(1, 1);
                    factor.H = random_hermitian(gen, dim, gamma);
                }
                factor.U = random_unitary(gen, dim);
                circuit.factors.push_back(factor);
            }
            circuit.validate();
            ++circuits_checked;

            std::vector<double> x(static_cast<std::size_t>(d));
            for (double &v : x) v = uniform_in(gen, -kPi, kPi);
            Eigen::MatrixXcd projector =
                Eigen::MatrixXcd::Zero(dim, dim);
            for (Eigen::Index i = 0; i < dim / 2; ++i) projector(i, i) = 1.0;

            // Odometer over multiplicity vectors with 1 <= |alpha| <= 4.
            std::vector<int> alpha(static_cast<std::size_t>(d), 0);
            while (true) {
                int total = 0;
                for (int v : alpha) total += v;
                if (total >= 1 && total <= 4) {
                    // Both calls raise InternalError on a violated bound;
                    // the ratios double-check the margins explicitly.
                    const Eigen::MatrixXcd dU =
                        circuits::circuit_partial_derivative(circuit, x,
                                                             alpha);
                    worst_unitary_ratio = std::max(
                        worst_unitary_ratio,
                        circuits::operator_norm(dU) /
                            std::pow(gamma, total));
                    const auto obj = circuits::objective_derivative_bound_check(
                        circuit, x, alpha, projector);
                    if (!obj.holds)
                        return {false, "objective envelope flag cleared"};
                    worst_objective_ratio = std::max(
                        worst_objective_ratio,
                        std::abs(obj.value) / std::pow(2.0 * gamma, total));
                    derivative_checks += 2;
                }
                std::size_t i = 0;
                while (i < alpha.size() && alpha[i] == 4) {
                    alpha[i] = 0;
                    ++i;
                }
                if (i == alpha.size()) break;
                ++alpha[i];
            }
        }
    }
    const bool pass = worst_unitary_ratio <= 1.0 + 1e-9 &&
                      worst_objective_ratio <= 1.0 + 1e-9;
    return {pass, fmt("%d circuits, %d derivative checks; worst "
                      "norm/envelope ratios %.4f and %.4f",
                      circuits_checked, derivative_checks,
                      worst_unitary_ratio, worst_objective_ratio)};
}

// ---------------------------------------------------------------------
// 12. Lower-bound machinery: pointwise family envelope, the radial
// hybrid constant, and the closed-form query bound.

Outcome criterion_lower_bounds() {
    std::mt19937_64 gen(seed_for("lower-bounds"));
    double worst_ratio = 0.0;
    for (int sample = 0; sample < 100000; ++sample) {
        const int d = 1 + static_cast<int>(uniform_index(gen, 3));
        const double eps = uniform_in(gen, 0.05, 0.3);
        const double c = uniform_in(gen, 0.5, 1.5);
        std::vector<double> x(static_cast<std::size_t>(d));
        // Radii both near the 1/c maximizer and in the tails.
        const double scale = uniform_in(gen, 0.1, 4.0) / c;
        for (double &v : x) v = scale * gaussian(gen);
        double sum = 0.0;
        for (int j = 1; j <= d; ++j) {
            const double v = bounds::hard_family_eval(j, x, eps, c);
            sum += v * v;
        }
        const double envelope =
            4.0 * eps * eps / (std::exp(1.0) * c * c);
        worst_ratio = std::max(worst_ratio, sum / envelope);
        if (sum > envelope * (1.0 + 1e-12))
            return {false,
                    fmt("family mass %.6e exceeds envelope %.6e", sum,
                        envelope)};
    }

    const double eps = 0.1;
    const double c = 1.0;
    double worst_constant_rel = 0.0;
    for (const int d : {1, 4}) {
        std::vector<std::vector<double>> points;
        for (int i = 0; i <= 3000; ++i) {
            std::vector<double> x(static_cast<std::size_t>(d), 0.0);
            x[0] = 1e-3 * i;
            points.push_back(std::move(x));
        }
        const auto fam = bounds::hard_family_table(d, eps, c, points);
        const std::vector<double> ref(points.size(), 0.0);
        const auto out = bounds::hybrid_lower_bound(fam, ref);
        const double predicted =
            std::sqrt(std::exp(1.0)) / 6.0 * c * std::sqrt(d) / eps;
        worst_constant_rel =
            std::max(worst_constant_rel,
                     std::abs(out.value - predicted) / predicted);
    }
    if (worst_constant_rel > 0.05)
        return {false, fmt("radial constant off by %.2f%% (cap 5%%)",
                           100.0 * worst_constant_rel)};

    const double closed_form = bounds::gradient_lower_bound(1.0, 0.1, 4);
    if (closed_form != 5.0)
        return {false,
                fmt("gradient_lower_bound(1, 0.1, 4) = %.17g, want 5",
                    closed_form)};
    return {true, fmt("10^5 samples under the family envelope (worst "
                      "ratio %.4f); radial constant within %.2f%%; closed "
                      "form exact",
                      worst_ratio, 100.0 * worst_constant_rel)};
}

} // namespace

int main() {
    const struct {
        const char *name;
        Outcome (*run)();
    } criteria[] = {
        {"stencil exact on random polynomials", criterion_stencil_exact},
        {"stencil error envelope on sin", criterion_stencil_envelope},
        {"coefficient mass bounds", criterion_coefficient_mass},
        {"exact affine phase readout", criterion_exact_affine},
        {"perturbed phase readout", criterion_perturbed_affine},
        {"probability-to-phase conversion", criterion_conversion},
        {"oblivious amplitude amplification", criterion_amplification},
        {"distribution phase simulation", criterion_distribution_phases},
        {"end-to-end smooth gradient", criterion_smooth_gradient},
        {"vqe gradient instance", criterion_vqe_gradient},
        {"circuit derivative envelopes", criterion_circuit_envelopes},
        {"query lower bounds", criterion_lower_bounds},
    };

    int failures = 0;
    int index = 0;
    for (const auto &criterion : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception &e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::printf("criterion %2d %-36s %s  (%.2f s) %s\n", index,
                    criterion.name, outcome.pass ? "PASS" : "FAIL", secs,
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures == 0)
        std::printf("all 12 criteria passed\n");
    else
        std::printf("%d of 12 criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
