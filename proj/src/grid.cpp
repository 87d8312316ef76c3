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

#include "qgrad/grid.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace qgrad::grid {

namespace {

void check_n(int n) {
    if (n < 1 || n > kMaxTotalQubits) {
        throw ConfigError("register size n must be in [1, " +
                          std::to_string(kMaxTotalQubits) + "], got " +
                          std::to_string(n));
    }
}

} // namespace

double label(int n, std::int64_t j) {
    check_n(n);
    const std::int64_t N = register_size(n);
    if (j < 0 || j >= N) {
        throw ConfigError("label index out of range: " + std::to_string(j));
    }
    // (2j - N + 1) / (2N); numerator and denominator are exact in double.
    return static_cast<double>(2 * j - N + 1) / static_cast<double>(2 * N);
}

std::vector<double> labels(int n) {
    check_n(n);
    const std::int64_t N = register_size(n);
    std::vector<double> out(static_cast<std::size_t>(N));
    for (std::int64_t j = 0; j < N; ++j) out[static_cast<std::size_t>(j)] = label(n, j);
    return out;
}

std::int64_t nearest_index(int n, double value) {
    check_n(n);
    if (!(value >= -0.5 && value <= 0.5)) {
        throw DomainError("value outside [-1/2, 1/2]: " +
                          std::to_string(value));
    }
    const std::int64_t N = register_size(n);
    // Solve label(j) ~= value; ties between neighbours go to the smaller j.
    const double t = value * static_cast<double>(N) +
                     static_cast<double>(N - 1) / 2.0;
    auto j = static_cast<std::int64_t>(std::ceil(t - 0.5));
    if (j < 0) j = 0;
    if (j >= N) j = N - 1;
    return j;
}

void GridSpec::validate() const {
    check_n(n);
    if (d < 1) throw ConfigError("dimension d must be >= 1");
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw ConfigError("scale r must be positive and finite");
    }
    if (y.size() != static_cast<std::size_t>(d)) {
        throw ConfigError("centre y must have d components");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw ConfigError("centre y must be finite");
    }
    if (n * d > kMaxTotalQubits) {
        throw ResourceError("grid needs " + std::to_string(n * d) +
                            " qubits; guard is " +
                            std::to_string(kMaxTotalQubits));
    }
}

std::string GridSpec::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["d"] = d;
    j["r"] = r;
    j["y"] = y;
    return j.dump();
}

GridSpec GridSpec::from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad grid JSON: ") + e.what());
    }
    GridSpec spec;
    try {
        spec.n = j.at("n").get<int>();
        spec.d = j.at("d").get<int>();
        spec.r = j.at("r").get<double>();
        spec.y = j.value("y", std::vector<double>{});
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad grid JSON field: ") + e.what());
    }
    if (spec.y.empty()) spec.y.assign(static_cast<std::size_t>(spec.d), 0.0);
    spec.validate();
    return spec;
}

void for_each_point(const GridSpec &spec, const PointVisitor &visit) {
    spec.validate();
    const int d = spec.d;
    const std::int64_t N = register_size(spec.n);
    const std::vector<double> lab = labels(spec.n);

    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> lv(static_cast<std::size_t>(d), lab[0]);
    std::vector<double> pt(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) pt[i] = spec.y[i] + spec.r * lab[0];

    const std::uint64_t total = spec.point_count();
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        visit(flat, lv, pt);
        // Odometer increment, register d-1 least significant.
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < N) {
                lv[i] = lab[static_cast<std::size_t>(idx[i])];
                pt[i] = spec.y[i] + spec.r * lv[i];
                break;
            }
            idx[i] = 0;
            lv[i] = lab[0];
            pt[i] = spec.y[i] + spec.r * lab[0];
        }
    }
}

std::vector<std::vector<double>> evaluation_points(const GridSpec &spec) {
    spec.validate();
    if (spec.n * spec.d > kMaxTabulateQubits) {
        throw ResourceError("refusing to materialize 2^" +
                            std::to_string(spec.n * spec.d) + " points");
    }
    std::vector<std::vector<double>> out;
    out.reserve(spec.point_count());
    for_each_point(spec, [&](std::uint64_t, std::span<const double>,
                             std::span<const double> p) {
        out.emplace_back(p.begin(), p.end());
    });
    return out;
}

std::vector<double> labels_of_flat(const GridSpec &spec, std::uint64_t flat) {
    const std::int64_t N = register_size(spec.n);
    std::vector<double> lv(static_cast<std::size_t>(spec.d));
    for (int i = spec.d - 1; i >= 0; --i) {
        lv[static_cast<std::size_t>(i)] =
            label(spec.n, static_cast<std::int64_t>(flat % static_cast<std::uint64_t>(N)));
        flat /= static_cast<std::uint64_t>(N);
    }
    return lv;
}

} // namespace qgrad::grid
