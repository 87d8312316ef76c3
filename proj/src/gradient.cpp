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

#include "qgrad/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qgrad/grid.hpp"
#include "qgrad/statevec.hpp"

namespace qgrad::grad {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double k42Pi = 42.0 * kPi;

struct Derived {
    double r = 0.0;
    int n_eps = 0;
    int n_M = 0;
    int n = 0;
};

// r, n_eps, n_M, n for a given half order m. M is the gradient sup bound.
Derived derive_for_m(int d, double eps, double c, double M, int m) {
    Derived out;
    const double cmsd = c * m * std::sqrt(static_cast<double>(d));
    const double base = 81.0 * 8.0 * k42Pi * cmsd / eps;
    out.r = 1.0 / (9.0 * cmsd * std::pow(base, 1.0 / (2.0 * m)));
    out.n_eps = static_cast<int>(std::ceil(std::log2(4.0 / (out.r * eps))));
    out.n_M = static_cast<int>(std::ceil(std::log2(3.0 * out.r * M)));
    // The ceiling already enforces M * r / 2^n_M <= 1/3; keep the premise
    // explicit against floating-point edge cases.
    while (M * out.r * std::ldexp(1.0, -out.n_M) > 1.0 / 3.0 + 1e-12) {
        ++out.n_M;
    }
    out.n = out.n_eps + out.n_M;
    return out;
}

bool fits_guard(int n, int d) {
    return n >= 1 && n * d <= grid::kMaxTotalQubits;
}

} // namespace

double GradientParameters::outcome_scale() const {
    return std::ldexp(1.0, n_M) / r;
}

std::uint64_t invocation_units(int m, double S) {
    const stencil::DifferenceScheme scheme = stencil::central_coefficients(m);
    std::uint64_t units = 0;
    for (int l = 1; l <= m; ++l) {
        units += 2 * static_cast<std::uint64_t>(
                         std::ceil(std::abs(scheme.at(l)) * S));
    }
    return units;
}

int repetition_count(int d, double rho) {
    const double raw = 12.0 * std::log(static_cast<double>(d) / rho);
    return std::max(1, static_cast<int>(std::ceil(raw)));
}

GradientParameters select_parameters(int d, double eps, double rho, double c,
                                     double M_g, bool enforce_guard) {
    if (d < 1) throw DomainError("dimension must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("accuracy must be a positive finite number");
    if (!(rho > 0.0) || !(rho < 1.0))
        throw DomainError("failure probability must lie in (0, 1)");
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("derivative scale must be positive");
    if (eps > c)
        throw ConfigError("accuracy eps exceeds the derivative scale c; the "
                          "guarantee needs eps <= c");
    const double M = (M_g > 0.0) ? M_g : c;
    if (eps >= M)
        throw ConfigError("accuracy eps must be smaller than the gradient "
                          "bound M_g");

    GradientParameters p;
    p.d = d;
    p.eps = eps;
    p.rho = rho;
    p.c = c;
    p.M_g = M;
    p.repetitions = repetition_count(d, rho);

    const int m0 = std::max(
        1, static_cast<int>(
               std::ceil(std::log2(c * std::sqrt(static_cast<double>(d)) / eps))));
    int m = m0;
    Derived der = derive_for_m(d, eps, c, M, m0);

    if (enforce_guard && !fits_guard(der.n, d)) {
        // Any half order is admissible here: the r(m) formula keeps the
        // remainder premise satisfied for every m >= 1, so pick the
        // cheapest register width that the simulator can hold.
        bool found = false;
        std::uint64_t best_units = std::numeric_limits<std::uint64_t>::max();
        for (int cand = 1; cand <= m0 + 10; ++cand) {
            const Derived alt = derive_for_m(d, eps, c, M, cand);
            if (!fits_guard(alt.n, d)) continue;
            const double S_alt = 2.0 * kPi * std::ldexp(1.0, alt.n_eps);
            const std::uint64_t units = invocation_units(cand, S_alt);
            if (units < best_units) {
                best_units = units;
                m = cand;
                der = alt;
                found = true;
            }
        }
        if (!found) {
            throw ResourceError(
                "no difference order fits " + std::to_string(d) +
                " registers within " + std::to_string(grid::kMaxTotalQubits) +
                " qubits at eps=" + std::to_string(eps));
        }
        p.adjusted_m = true;
    }

    p.m = m;
    p.r = der.r;
    p.n_eps = der.n_eps;
    p.n_M = der.n_M;
    p.n = der.n;
    p.S = 2.0 * kPi * std::ldexp(1.0, der.n_eps);
    p.units_per_invocation = invocation_units(p.m, p.S);
    return p;
}

std::vector<double> jordan_core(const LabelPhaseFn &phase_fn, int d, int n,
                                std::mt19937_64 &rng) {
    if (d < 1) throw DomainError("dimension must be positive");
    if (n < 1) throw DomainError("register width must be positive");
    if (n * d > grid::kMaxTotalQubits)
        throw ResourceError("state of " + std::to_string(n * d) +
                            " qubits exceeds the dense budget");
    sv::StateVector st = sv::StateVector::uniform(d, n);
    st.apply_diagonal_phase(phase_fn);
    for (int reg = 0; reg < d; ++reg) st.inverse_qft_grid(reg);
    return st.measure_registers(rng).labels;
}

std::vector<double> jordan_output_distribution(const LabelPhaseFn &phase_fn,
                                               int d, int n) {
    if (d < 1) throw DomainError("dimension must be positive");
    if (n < 1) throw DomainError("register width must be positive");
    sv::StateVector st = sv::StateVector::uniform(d, n);
    st.apply_diagonal_phase(phase_fn);
    for (int reg = 0; reg < d; ++reg) st.inverse_qft_grid(reg);
    return st.output_distribution();
}

std::string GradientReport::to_json() const {
    nlohmann::json j;
    j["estimate"] = estimate;
    if (truth) {
        j["truth"] = *truth;
        j["err_inf"] = err_inf.value();
    }
    j["repetitions"] = repetitions;
    j["phase_query_units"] = phase_query_units;
    j["probability_queries"] = probability_queries;
    j["params"] = {{"m", params.m},         {"r", params.r},
                   {"S", params.S},         {"n", params.n},
                   {"n_eps", params.n_eps}, {"n_M", params.n_M}};
    j["seed"] = seed;
    return j.dump();
}

GradientReport estimate_gradient_affine(const ScaledOracle &oracle,
                                        const GradientParameters &params,
                                        std::uint64_t seed,
                                        oracles::Ledger ledger,
                                        const std::vector<double> *truth) {
    const int d = params.d;
    const int n = params.n;
    if (d < 1) throw DomainError("dimension must be positive");
    if (n < 1) throw DomainError("register width must be positive");
    if (n * d > grid::kMaxTotalQubits)
        throw ResourceError("state of " + std::to_string(n * d) +
                            " qubits exceeds the dense budget");
    const int reps = std::max(1, params.repetitions);

    const std::uint64_t phase_before = ledger ? ledger->phase_query_units() : 0;
    const std::uint64_t prob_before = ledger ? ledger->probability_queries() : 0;

    // Every repetition prepares the same pre-measurement state, so build it
    // once and draw independent measurements; the ledger still pays per
    // repetition.
    sv::StateVector st = sv::StateVector::uniform(d, n);
    st.apply_diagonal_phase(oracle.phase);
    for (int reg = 0; reg < d; ++reg) st.inverse_qft_grid(reg);

    std::mt19937_64 rng(seed);
    const std::vector<sv::Outcome> outcomes = st.sample(rng, reps);
    if (oracle.charge_invocation) {
        for (int rep = 0; rep < reps; ++rep) oracle.charge_invocation();
    }

    const double scale = params.outcome_scale();
    GradientReport report;
    report.params = params;
    report.seed = seed;
    report.repetitions = reps;
    report.raw.reserve(static_cast<std::size_t>(reps));
    for (const sv::Outcome &out : outcomes) {
        std::vector<double> row(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            row[static_cast<std::size_t>(i)] =
                scale * out.labels[static_cast<std::size_t>(i)];
        report.raw.push_back(std::move(row));
    }

    report.estimate.resize(static_cast<std::size_t>(d));
    std::vector<double> column(static_cast<std::size_t>(reps));
    for (int i = 0; i < d; ++i) {
        for (int rep = 0; rep < reps; ++rep)
            column[static_cast<std::size_t>(rep)] =
                report.raw[static_cast<std::size_t>(rep)]
                          [static_cast<std::size_t>(i)];
        std::nth_element(column.begin(),
                         column.begin() + (reps - 1) / 2, column.end());
        report.estimate[static_cast<std::size_t>(i)] =
            column[static_cast<std::size_t>((reps - 1) / 2)];
    }

    if (ledger) {
        report.phase_query_units = ledger->phase_query_units() - phase_before;
        report.probability_queries =
            ledger->probability_queries() - prob_before;
    } else {
        report.phase_query_units =
            oracle.units_per_invocation * static_cast<std::uint64_t>(reps);
    }

    if (truth) {
        report.truth = *truth;
        double err = 0.0;
        for (int i = 0; i < d; ++i)
            err = std::max(err,
                           std::abs(report.estimate[static_cast<std::size_t>(i)] -
                                    (*truth)[static_cast<std::size_t>(i)]));
        report.err_inf = err;
    }
    return report;
}

GradientReport gradient_via_central_difference(
    const PointFn &f, std::span<const double> y,
    const GradientParameters &params, std::uint64_t seed,
    oracles::Ledger ledger, const std::vector<double> *truth) {
    const int d = params.d;
    if (static_cast<int>(y.size()) != d)
        throw ConfigError("center has " + std::to_string(y.size()) +
                          " coordinates, expected " + std::to_string(d));
    if (params.m < 1) throw ConfigError("difference order must be positive");
    if (!(params.r > 0.0)) throw ConfigError("grid scale must be positive");
    if (params.c > 0.0) {
        const stencil::TailBound tail =
            stencil::analytic_tail_bound(params.r, params.c, params.m, d);
        if (!tail.finite)
            throw ConfigError(
                "remainder series diverges (8*r*c*m*sqrt(d) = " +
                std::to_string(tail.q) + " >= 1); choose a smaller r");
    }

    const stencil::DifferenceScheme scheme =
        stencil::central_coefficients(params.m);
    const double S = params.S;
    const double r = params.r;
    const int m = params.m;
    std::vector<double> center(y.begin(), y.end());

    ScaledOracle oracle;
    oracle.units_per_invocation = params.units_per_invocation;
    oracle.phase = [f, scheme, S, r, m, d, center,
                    pt = std::vector<double>(static_cast<std::size_t>(d))](
                       std::span<const double> x) mutable {
        double acc = 0.0;
        for (int l = -m; l <= m; ++l) {
            if (l == 0) continue;
            for (int i = 0; i < d; ++i)
                pt[static_cast<std::size_t>(i)] =
                    center[static_cast<std::size_t>(i)] +
                    r * l * x[static_cast<std::size_t>(i)];
            acc += scheme.at(l) * f(pt);
        }
        return S * acc;
    };
    if (ledger) {
        oracle.charge_invocation = [ledger, scheme, S, m]() {
            for (int l = -m; l <= m; ++l) {
                if (l == 0) continue;
                ledger->charge_phase(scheme.at(l) * S);
            }
        };
    }
    return estimate_gradient_affine(oracle, params, seed, ledger, truth);
}

GradientReport estimate_gradient_smooth(const PointFn &f,
                                        std::span<const double> y, int d,
                                        double eps, double rho, double c,
                                        std::uint64_t seed,
                                        oracles::Ledger ledger,
                                        const std::vector<double> *truth,
                                        double M_g) {
    const GradientParameters params =
        select_parameters(d, eps, rho, c, M_g, true);
    const double budget =
        2.0 * params.m +
        params.S * (2.0 * std::log(static_cast<double>(params.m)) + 2.0);
    if (static_cast<double>(params.units_per_invocation) > budget)
        throw InternalError("per-invocation phase units exceed the "
                            "closed-form budget");
    return gradient_via_central_difference(f, y, params, seed, ledger, truth);
}

} // namespace qgrad::grad
