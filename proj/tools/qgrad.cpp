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

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgrad/bounds.hpp"
#include "qgrad/circuits.hpp"
#include "qgrad/gradient.hpp"
#include "qgrad/grid.hpp"
#include "qgrad/harness.hpp"
#include "qgrad/oracles.hpp"
#include "qgrad/rng.hpp"
#include "qgrad/stencil.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw qgrad::ConfigError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string &text, const std::string &out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw qgrad::ConfigError("cannot write '" + out_path + "'");
    out << text;
}

int run_grid(int n, int d, const std::string &out_path) {
    json j;
    j["n"] = n;
    j["d"] = d;
    qgrad::grid::GridSpec spec;
    spec.n = n;
    spec.d = d;
    j["point_count"] = spec.point_count();
    const std::vector<double> labels = qgrad::grid::labels(n);
    if (labels.size() <= 64)
        j["labels"] = labels;
    else {
        j["first_label"] = labels.front();
        j["last_label"] = labels.back();
    }
    write_output(j.dump(2), out_path);
    return 0;
}

int run_stencil(int m, const std::string &out_path) {
    const qgrad::stencil::DifferenceScheme scheme =
        qgrad::stencil::central_coefficients(m);
    const qgrad::stencil::L1Mass mass = qgrad::stencil::coefficient_l1(m);
    json j;
    j["m"] = m;
    json coeffs = json::array();
    for (int l = -m; l <= m; ++l) {
        if (l == 0) continue;
        coeffs.push_back({{"l", l}, {"a", scheme.at(l)}});
    }
    j["coefficients"] = coeffs;
    j["one_sided_abs_sum"] = mass.sum;
    j["log_bound"] = mass.bound;
    j["holds"] = mass.holds;
    write_output(j.dump(2), out_path);
    return 0;
}

int run_convert(double eps, std::uint64_t seed, const std::string &out_path) {
    std::mt19937_64 gen(seed);
    std::vector<double> p(4);
    for (double &v : p) v = qgrad::uniform_in(gen, 0.05, 0.95);
    auto ledger = qgrad::oracles::make_ledger();
    const qgrad::oracles::DenseProbabilityOracle oracle =
        qgrad::oracles::build_probability_oracle(p, 1, ledger);
    const qgrad::oracles::PhaseConversion conv =
        qgrad::oracles::probability_to_phase(oracle, eps);
    json j;
    j["eps"] = eps;
    j["p"] = p;
    j["M"] = conv.M;
    j["rounds"] = conv.rounds;
    j["max_deviation"] = conv.max_deviation;
    j["probability_queries"] = conv.probability_queries;
    write_output(j.dump(2), out_path);
    return 0;
}

int run_gradient(const std::string &target_name, int d, double eps,
                 double rho, std::uint64_t seed, int trials,
                 const std::string &out_path) {
    const qgrad::harness::Target &target =
        qgrad::harness::target_by_name(target_name);
    const std::vector<double> x0(static_cast<std::size_t>(d), 0.0);
    const std::vector<double> truth = target.gradient(x0);
    json jobs = json::array();
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
        auto ledger = qgrad::oracles::make_ledger();
        const std::uint64_t job_seed =
            qgrad::combine_seed(seed, static_cast<std::uint64_t>(t));
        const qgrad::grad::GradientReport report =
            qgrad::grad::estimate_gradient_smooth(target.value, x0, d, eps,
                                                  rho, target.c, job_seed,
                                                  ledger, &truth);
        if (report.err_inf && *report.err_inf <= eps) ++successes;
        jobs.push_back(json::parse(report.to_json()));
    }
    json j;
    j["target"] = target_name;
    j["trials"] = trials;
    j["within_eps"] = successes;
    j["jobs"] = jobs;
    write_output(j.dump(2), out_path);
    return 0;
}

int run_vqe(const std::string &config_path, std::vector<double> at,
            double eps, double rho, std::uint64_t seed,
            const std::string &out_path) {
    const qgrad::circuits::VqeInstance instance =
        qgrad::circuits::VqeInstance::from_json(read_file(config_path));
    if (at.empty())
        at.assign(static_cast<std::size_t>(instance.parameter_count()), 0.0);
    auto ledger = qgrad::oracles::make_ledger();
    const qgrad::circuits::VqeGradientResult result =
        qgrad::circuits::vqe_gradient(instance, at, eps, rho, seed, ledger);
    json j = json::parse(result.report.to_json());
    j["delta"] = result.delta;
    j["conversion_order"] = result.conversion_order;
    j["probability_queries"] = result.probability_queries;
    write_output(j.dump(2), out_path);
    return 0;
}

int run_bounds(double c, double eps, int d, const std::string &out_path) {
    json j;
    j["c"] = c;
    j["eps"] = eps;
    j["d"] = d;
    j["gradient_lower_bound"] = qgrad::bounds::gradient_lower_bound(c, eps, d);
    j["family_mass_peak"] = 4.0 * eps * eps / (std::exp(1.0) * c * c);
    write_output(j.dump(2), out_path);
    return 0;
}

int run_bench(const std::string &config_path, std::uint64_t seed,
              bool seed_given, int trials, bool trials_given,
              const std::string &out_path) {
    qgrad::harness::ExperimentConfig cfg =
        qgrad::harness::ExperimentConfig::from_json(read_file(config_path));
    if (seed_given) cfg.seed = seed;
    if (trials_given) cfg.trials = trials;
    const std::vector<qgrad::harness::ExperimentRecord> records =
        qgrad::harness::run_scaling_experiment(cfg);
    write_output(qgrad::harness::to_csv(records), out_path);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qgrad: quantum gradient estimation toolkit"};
    app.require_subcommand(1);

    std::string out_path;
    std::string config_path;
    std::uint64_t seed = 20260312;
    int trials = 1;
    double eps = 0.05;
    double rho = 1.0 / 3.0;
    int n = 4;
    int d = 1;
    int m = 3;
    double c = 1.0;
    std::string target_name = "sin-sum";
    std::vector<double> at;

    CLI::App *grid = app.add_subcommand("grid", "dyadic grid labels");
    grid->add_option("--n", n, "qubits per register");
    grid->add_option("--d", d, "registers");
    grid->add_option("--out", out_path, "output path (default stdout)");

    CLI::App *stencil =
        app.add_subcommand("stencil", "central-difference coefficients");
    stencil->add_option("--m", m, "half order");
    stencil->add_option("--out", out_path, "output path");

    CLI::App *convert = app.add_subcommand(
        "convert", "probability-to-phase conversion on a random instance");
    convert->add_option("--eps", eps, "target accuracy");
    convert->add_option("--seed", seed, "rng seed");
    convert->add_option("--out", out_path, "output path");

    CLI::App *gradient =
        app.add_subcommand("gradient", "smooth-pipeline gradient jobs");
    gradient->add_option("--target", target_name, "objective name");
    gradient->add_option("--d", d, "dimension");
    gradient->add_option("--eps", eps, "target accuracy");
    gradient->add_option("--rho", rho, "failure budget");
    gradient->add_option("--seed", seed, "rng seed");
    gradient->add_option("--trials", trials, "independent jobs");
    gradient->add_option("--out", out_path, "output path");

    CLI::App *vqe =
        app.add_subcommand("vqe", "gradient of a variational instance");
    vqe->add_option("--config", config_path, "instance JSON file")
        ->required();
    vqe->add_option("--at", at, "evaluation point (defaults to the origin)");
    vqe->add_option("--eps", eps, "target accuracy");
    vqe->add_option("--rho", rho, "failure budget");
    vqe->add_option("--seed", seed, "rng seed");
    vqe->add_option("--out", out_path, "output path");

    CLI::App *bounds =
        app.add_subcommand("bounds", "query lower-bound quantities");
    bounds->add_option("--c", c, "derivative growth scale");
    bounds->add_option("--eps", eps, "accuracy");
    bounds->add_option("--d", d, "dimension");
    bounds->add_option("--out", out_path, "output path");

    CLI::App *bench =
        app.add_subcommand("bench", "scaling sweep to CSV");
    CLI::Option *bench_config =
        bench->add_option("--config", config_path, "experiment JSON file");
    bench_config->required();
    CLI::Option *bench_seed =
        bench->add_option("--seed", seed, "override config seed");
    CLI::Option *bench_trials =
        bench->add_option("--trials", trials, "override config trials");
    bench->add_option("--out", out_path, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (grid->parsed()) return run_grid(n, d, out_path);
        if (stencil->parsed()) return run_stencil(m, out_path);
        if (convert->parsed()) return run_convert(eps, seed, out_path);
        if (gradient->parsed())
            return run_gradient(target_name, d, eps, rho, seed, trials,
                                out_path);
        if (vqe->parsed())
            return run_vqe(config_path, at, eps, rho, seed, out_path);
        if (bounds->parsed()) return run_bounds(c, eps, d, out_path);
        if (bench->parsed())
            return run_bench(config_path, seed, bench_seed->count() > 0,
                             trials, bench_trials->count() > 0, out_path);
    } catch (const qgrad::ResourceError &e) {
        std::cerr << "resource guard: " << e.what() << '\n';
        return 3;
    } catch (const qgrad::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qgrad::ValidationError &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const qgrad::DomainError &e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
