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

#include "qgrad/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "json.hpp"
#include "qgrad/grid.hpp"
#include "qgrad/rng.hpp"
#include "qgrad/stencil.hpp"

namespace qgrad::harness {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kMaxSamplesPerPoint = 1000000000000ULL;

double coordinate_sum(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

void check_finite_point(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v))
            throw DomainError("harness: coordinate not finite");
}

double sample_probability(const grad::PointFn &p, std::span<const double> x) {
    double v = p(x);
    if (!std::isfinite(v) || v < -1e-9 || v > 1.0 + 1e-9)
        throw DomainError("harness: sampler value escapes [0,1]");
    return std::min(std::max(v, 0.0), 1.0);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string sanitize_status(std::string s) {
    for (char &c : s) {
        if (c == ',' || c == '\n') c = ';';
    }
    return s;
}

int ceil_log2(double v) {
    return static_cast<int>(std::ceil(std::log2(v)));
}

grad::GradientParameters derived_parameters(int d, double eps, double rho,
                                            int m, double r,
                                            double slope_cap) {
    grad::GradientParameters p;
    p.d = d;
    p.eps = eps;
    p.rho = rho;
    p.c = 0.0; // remainder checking is not part of these models
    p.M_g = slope_cap;
    p.m = m;
    p.r = r;
    p.n_eps = ceil_log2(4.0 / (r * eps));
    p.n_M = ceil_log2(3.0 * r * slope_cap);
    while (slope_cap * r * std::ldexp(1.0, -p.n_M) > 1.0 / 3.0 + 1e-12)
        ++p.n_M;
    p.n = p.n_eps + p.n_M;
    if (p.n < 1)
        throw DomainError("harness: derived grid register is empty");
    if (p.n * d > grid::kMaxTotalQubits)
        throw ResourceError("harness: " + std::to_string(p.n) + "*" +
                            std::to_string(d) +
                            " grid qubits exceed the dense budget of " +
                            std::to_string(grid::kMaxTotalQubits));
    p.S = 2.0 * kPi * std::ldexp(1.0, p.n_eps);
    p.repetitions = grad::repetition_count(d, rho);
    p.units_per_invocation = grad::invocation_units(m, p.S);
    return p;
}

} // namespace

const Target &target_by_name(const std::string &name) {
    static const Target sin_sum = [] {
        Target t;
        t.name = "sin-sum";
        t.value = [](std::span<const double> x) {
            return std::sin(coordinate_sum(x));
        };
        t.probability = [](std::span<const double> x) {
            return 0.5 * (1.0 + std::sin(coordinate_sum(x)));
        };
        t.probability_scale = 2.0;
        t.gradient = [](std::span<const double> x) {
            return std::vector<double>(x.size(),
                                       std::cos(coordinate_sum(x)));
        };
        t.c = 1.0;
        t.slope_cap = 1.0;
        return t;
    }();
    if (name == sin_sum.name) return sin_sum;
    throw DomainError("harness: unknown target '" + name + "'");
}

ClassicalSamplingResult classical_gradient_sampling(
    const grad::PointFn &p, std::span<const double> x, double eps,
    double delta_step, std::uint64_t seed) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw ConfigError("classical sampling: eps must be positive");
    if (!(delta_step > 0.0) || !std::isfinite(delta_step))
        throw ConfigError("classical sampling: step must be positive");
    check_finite_point(x);

    const double raw = std::ceil(4.0 / (eps * eps));
    if (raw > static_cast<double>(kMaxSamplesPerPoint))
        throw ResourceError("classical sampling: sample count too large");
    const std::uint64_t samples = static_cast<std::uint64_t>(raw);

    std::mt19937_64 gen(seed);
    auto estimate_at = [&](std::span<const double> point) {
        const double prob = sample_probability(p, point);
        std::uint64_t hits = 0;
        for (std::uint64_t s = 0; s < samples; ++s)
            if (uniform01(gen) < prob) ++hits;
        return static_cast<double>(hits) / static_cast<double>(samples);
    };

    ClassicalSamplingResult out;
    out.samples_per_point = samples;
    const double base = estimate_at(x);
    std::vector<double> shifted(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        shifted[i] = x[i] + delta_step;
        out.estimate.push_back((estimate_at(shifted) - base) / delta_step);
        shifted[i] = x[i];
    }
    out.total_samples = samples * (static_cast<std::uint64_t>(x.size()) + 1);
    return out;
}

SemiclassicalResult semiclassical_gradient(const grad::PointFn &f,
                                           std::span<const double> x,
                                           double eps, int m,
                                           std::uint64_t seed, double B) {
    if (m < 1 || m > 100)
        throw ConfigError("semiclassical: order must be in 1..100");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw ConfigError("semiclassical: eps must be positive");
    if (!(B > 0.0) || !std::isfinite(B))
        throw ConfigError("semiclassical: B must be positive");
    check_finite_point(x);

    const stencil::DifferenceScheme scheme = stencil::central_coefficients(m);
    SemiclassicalResult out;
    out.m = m;
    out.delta =
        std::pow(eps * std::exp(0.5 * m) / (2.0 * B), 1.0 / (2.0 * m));
    out.eps_prime = eps * out.delta / (2.0 * scheme.total_abs());
    out.queries_per_eval =
        static_cast<std::uint64_t>(std::ceil(kPi / out.eps_prime));
    out.query_cost = out.queries_per_eval *
                     static_cast<std::uint64_t>(2 * m) *
                     static_cast<std::uint64_t>(x.size());

    std::mt19937_64 gen(seed);
    std::vector<double> point(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto noisy = [&](double t) {
            point[i] = x[i] + t;
            const double v = f(point) + uniform_in(gen, -out.eps_prime,
                                                   out.eps_prime);
            point[i] = x[i];
            return v;
        };
        out.estimate.push_back(
            stencil::apply_scheme_1d(noisy, scheme, out.delta) / out.delta);
    }
    return out;
}

grad::GradientParameters jordan_original_parameters(int d, double eps,
                                                    double rho,
                                                    double slope_cap) {
    if (d < 1) throw DomainError("jordan-original: d must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("jordan-original: eps must be positive");
    if (!(rho > 0.0) || !(rho < 1.0))
        throw DomainError("jordan-original: rho must be in (0,1)");
    if (!(slope_cap > 0.0))
        throw ConfigError("jordan-original: slope cap must be positive");
    const double r = eps / std::sqrt(static_cast<double>(d));
    return derived_parameters(d, eps, rho, 1, r, slope_cap);
}

grad::GradientReport jordan_original_gradient(
    const grad::PointFn &f, std::span<const double> x, double eps, double rho,
    std::uint64_t seed, oracles::Ledger ledger,
    const std::vector<double> *truth) {
    const grad::GradientParameters params = jordan_original_parameters(
        static_cast<int>(x.size()), eps, rho);
    return grad::gradient_via_central_difference(f, x, params, seed, ledger,
                                                 truth);
}

grad::GradientParameters fixed_order_parameters(int d, double eps, double rho,
                                                int m, double c,
                                                double slope_cap) {
    if (d < 1) throw DomainError("fixed-order: d must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("fixed-order: eps must be positive");
    if (!(rho > 0.0) || !(rho < 1.0))
        throw DomainError("fixed-order: rho must be in (0,1)");
    if (m < 1 || m > 100) throw ConfigError("fixed-order: order out of range");
    if (!(c > 0.0) || !(slope_cap > 0.0))
        throw ConfigError("fixed-order: scales must be positive");
    const double cmsd = c * m * std::sqrt(static_cast<double>(d));
    const double base = 81.0 * 8.0 * 42.0 * kPi * cmsd / eps;
    const double r = 1.0 / (9.0 * cmsd * std::pow(base, 1.0 / (2.0 * m)));
    return derived_parameters(d, eps, rho, m, r, slope_cap);
}

const std::vector<std::string> &known_methods() {
    static const std::vector<std::string> methods = {
        "classical-sampling", "semi-classical", "jordan-original",
        "improved-smooth", "improved-polynomial"};
    return methods;
}

ExperimentConfig ExperimentConfig::from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("experiment config: bad JSON: ") +
                          e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.methods = j.at("methods").get<std::vector<std::string>>();
        cfg.d_values = j.at("d_values").get<std::vector<int>>();
        cfg.eps_values = j.at("eps_values").get<std::vector<double>>();
        cfg.trials = j.value("trials", 1);
        cfg.seed = j.value("seed", static_cast<std::uint64_t>(20260312));
        cfg.rho = j.value("rho", 1.0 / 3.0);
        cfg.target = j.value("target", std::string("sin-sum"));
        const std::string wall = j.value("wall_clock", std::string("omit"));
        if (wall == "measured")
            cfg.measure_wall_clock = true;
        else if (wall == "omit")
            cfg.measure_wall_clock = false;
        else
            throw ConfigError(
                "experiment config: wall_clock must be measured or omit");
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("experiment config: bad field: ") +
                          e.what());
    }
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["methods"] = methods;
    j["d_values"] = d_values;
    j["eps_values"] = eps_values;
    j["trials"] = trials;
    j["seed"] = seed;
    j["rho"] = rho;
    j["target"] = target;
    j["wall_clock"] = measure_wall_clock ? "measured" : "omit";
    return j.dump(2);
}

void ExperimentConfig::validate() const {
    if (methods.empty() || d_values.empty() || eps_values.empty())
        throw ConfigError("experiment config: methods, d_values and "
                          "eps_values must be nonempty");
    for (const std::string &m : methods) {
        const std::vector<std::string> &known = known_methods();
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw ConfigError("experiment config: unknown method '" + m + "'");
    }
    for (int d : d_values)
        if (d < 1) throw ConfigError("experiment config: d must be positive");
    for (double e : eps_values)
        if (!(e > 0.0) || !std::isfinite(e))
            throw ConfigError("experiment config: eps must be positive");
    if (trials < 1)
        throw ConfigError("experiment config: trials must be positive");
    if (!(rho > 0.0) || !(rho < 1.0))
        throw ConfigError("experiment config: rho must be in (0,1)");
    target_by_name(target); // DomainError on unknown target
}

namespace {

ExperimentRecord run_cell(const ExperimentConfig &config, const Target &target,
                          const std::string &method, int d, double eps,
                          int trial) {
    ExperimentRecord rec;
    rec.method = method;
    rec.d = d;
    rec.eps = eps;
    rec.seed = combine_seed(
        config.seed,
        hash_string(method + "|" + std::to_string(d) + "|" +
                    format_double(eps) + "|" + std::to_string(trial)));

    const std::vector<double> x0(static_cast<std::size_t>(d), 0.0);
    const std::vector<double> truth = target.gradient(x0);
    auto err_against_truth = [&truth](std::span<const double> est) {
        double err = 0.0;
        for (std::size_t i = 0; i < est.size(); ++i)
            err = std::max(err, std::abs(est[i] - truth[i]));
        return err;
    };

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (method == "classical-sampling") {
            ClassicalSamplingResult res = classical_gradient_sampling(
                target.probability, x0, eps, 0.1, rec.seed);
            std::vector<double> est(res.estimate);
            for (double &v : est) v *= target.probability_scale;
            rec.err_inf = err_against_truth(est);
            rec.query_cost = res.total_samples;
            rec.repetitions = 1;
        } else if (method == "semi-classical") {
            const int m = std::max(
                1, static_cast<int>(std::ceil(std::log2(1.0 / eps))));
            SemiclassicalResult res =
                semiclassical_gradient(target.value, x0, eps, m, rec.seed);
            rec.err_inf = err_against_truth(res.estimate);
            rec.query_cost = res.query_cost;
            rec.repetitions = 1;
        } else if (method == "jordan-original") {
            auto ledger = oracles::make_ledger();
            grad::GradientReport report = jordan_original_gradient(
                target.value, x0, eps, config.rho, rec.seed, ledger, &truth);
            rec.err_inf = report.err_inf.value_or(0.0);
            rec.query_cost = report.phase_query_units;
            rec.repetitions = report.repetitions;
        } else if (method == "improved-smooth") {
            auto ledger = oracles::make_ledger();
            grad::GradientReport report = grad::estimate_gradient_smooth(
                target.value, x0, d, eps, config.rho, target.c, rec.seed,
                ledger, &truth);
            rec.err_inf = report.err_inf.value_or(0.0);
            rec.query_cost = report.phase_query_units;
            rec.repetitions = report.repetitions;
        } else if (method == "improved-polynomial") {
            auto ledger = oracles::make_ledger();
            const grad::GradientParameters params = fixed_order_parameters(
                d, eps, config.rho, 2, target.c, target.slope_cap);
            grad::GradientReport report = grad::gradient_via_central_difference(
                target.value, x0, params, rec.seed, ledger, &truth);
            rec.err_inf = report.err_inf.value_or(0.0);
            rec.query_cost = report.phase_query_units;
            rec.repetitions = report.repetitions;
        } else {
            throw ConfigError("experiment: unknown method '" + method + "'");
        }
        rec.status = "ok";
    } catch (const ResourceError &e) {
        rec.err_inf = 0.0;
        rec.query_cost = 0;
        rec.repetitions = 0;
        rec.status = sanitize_status(std::string("skipped: ") + e.what());
    }
    if (config.measure_wall_clock) {
        const auto t1 = std::chrono::steady_clock::now();
        rec.wall_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    return rec;
}

} // namespace

std::vector<ExperimentRecord> run_scaling_experiment(
    const ExperimentConfig &config) {
    config.validate();
    const Target &target = target_by_name(config.target);
    std::vector<ExperimentRecord> records;
    for (const std::string &method : config.methods)
        for (int d : config.d_values)
            for (double eps : config.eps_values)
                for (int trial = 0; trial < config.trials; ++trial)
                    records.push_back(
                        run_cell(config, target, method, d, eps, trial));
    return records;
}

std::string to_csv(const std::vector<ExperimentRecord> &records) {
    std::string out =
        "method,d,eps,err_inf,query_cost,repetitions,seed,wall_ms,status\n";
    char buf[256];
    for (const ExperimentRecord &r : records) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%s,%s,%llu,%d,%llu,%.3f,%s\n",
                      r.method.c_str(), r.d, format_double(r.eps).c_str(),
                      format_double(r.err_inf).c_str(),
                      static_cast<unsigned long long>(r.query_cost),
                      r.repetitions,
                      static_cast<unsigned long long>(r.seed), r.wall_ms,
                      r.status.c_str());
        out += buf;
    }
    return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("loglog_slope: need matching samples, at least 2");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ConfigError("loglog_slope: samples must be positive");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw ConfigError("loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

} // namespace qgrad::harness
