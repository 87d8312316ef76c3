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

#include "qgrad/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace qgrad::bounds {

namespace {

void check_scales(double eps, double c) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw DomainError("eps must be positive and finite");
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("c must be positive and finite");
}

// d^k/du^k exp(-c^2 u^2 / 2) at u = 0.
double even_factor(int k, double c) {
    if (k % 2 != 0) return 0.0;
    const int l = k / 2;
    double v = 1.0;
    for (int t = 1; t <= l; ++t)
        v *= -0.5 * c * c * (2.0 * t) * (2.0 * t - 1.0) / t;
    return v;
}

// d^k/du^k (u * exp(-c^2 u^2 / 2)) at u = 0, without the prefactor.
double odd_factor(int k, double c) {
    if (k % 2 != 1) return 0.0;
    const int l = (k - 1) / 2;
    double v = 1.0;
    for (int t = 1; t <= l; ++t)
        v *= -0.5 * c * c * (2.0 * t + 1.0) * (2.0 * t) / t;
    return v;
}

} // namespace

double hard_family_eval(int j, std::span<const double> x, double eps,
                        double c) {
    check_scales(eps, c);
    for (double xi : x)
        if (!std::isfinite(xi)) throw DomainError("point must be finite");
    if (j == 0) return 0.0;
    if (j < 1 || j > static_cast<int>(x.size()))
        throw DomainError("member index " + std::to_string(j) +
                          " outside 1.." + std::to_string(x.size()));
    double norm2 = 0.0;
    for (double xi : x) norm2 += xi * xi;
    return 2.0 * eps * x[static_cast<std::size_t>(j - 1)] *
           std::exp(-0.5 * c * c * norm2);
}

std::vector<std::vector<double>> hard_family_table(
    int d, double eps, double c,
    const std::vector<std::vector<double>> &points) {
    if (d < 1) throw DomainError("dimension must be positive");
    std::vector<std::vector<double>> table(
        static_cast<std::size_t>(d),
        std::vector<double>(points.size(), 0.0));
    for (std::size_t p = 0; p < points.size(); ++p) {
        if (static_cast<int>(points[p].size()) != d)
            throw ConfigError("point " + std::to_string(p) + " has " +
                              std::to_string(points[p].size()) +
                              " coordinates, expected " + std::to_string(d));
        for (int j = 1; j <= d; ++j)
            table[static_cast<std::size_t>(j - 1)][p] =
                hard_family_eval(j, points[p], eps, c);
    }
    return table;
}

HybridBound hybrid_lower_bound(
    const std::vector<std::vector<double>> &family_values,
    std::span<const double> reference_values) {
    if (family_values.empty())
        throw ConfigError("family must contain at least one function");
    const std::size_t points = reference_values.size();
    if (points == 0) throw ConfigError("point set must be nonempty");
    for (const auto &row : family_values)
        if (row.size() != points)
            throw ConfigError("family rows must match the reference length");

    HybridBound out;
    for (std::size_t p = 0; p < points; ++p) {
        double sum = 0.0;
        for (const auto &row : family_values) {
            const double diff = row[p] - reference_values[p];
            sum += std::min(diff * diff, 4.0);
        }
        out.max_sum = std::max(out.max_sum, sum);
    }
    if (out.max_sum == 0.0) {
        out.infinite = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = std::sqrt(static_cast<double>(family_values.size())) / 3.0 /
                std::sqrt(out.max_sum);
    return out;
}

double gradient_lower_bound(double c, double eps, int d) {
    check_scales(eps, c);
    if (d < 1) throw DomainError("dimension must be positive");
    if (2.0 * eps > c)
        throw ConfigError("premise 2*eps <= c violated (eps=" +
                          std::to_string(eps) + ", c=" + std::to_string(c) +
                          ")");
    return c * std::sqrt(static_cast<double>(d)) / (4.0 * eps);
}

double hard_family_derivative(int j, double c, std::span<const int> alpha,
                              double prefactor) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("c must be positive and finite");
    if (j < 1 || j > static_cast<int>(alpha.size()))
        throw DomainError("member index outside the coordinate range");
    for (int ai : alpha)
        if (ai < 0) throw DomainError("multiplicities must be nonnegative");
    const double pre = (prefactor > 0.0) ? prefactor : c;

    double value = pre;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const int k = alpha[i];
        value *= (static_cast<int>(i) == j - 1) ? odd_factor(k, c)
                                                : even_factor(k, c);
        if (value == 0.0) return 0.0;
    }
    return value;
}

DerivativeCertificate hard_family_derivative_certificate(int j, double c,
                                                         int k_max, int d,
                                                         double prefactor) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("c must be positive and finite");
    if (d < 1) throw DomainError("dimension must be positive");
    if (j < 1 || j > d)
        throw DomainError("member index outside the coordinate range");
    if (k_max < 0 || k_max > 8)
        throw DomainError("total order is capped at 8");
    const double pre = (prefactor > 0.0) ? prefactor : c;

    DerivativeCertificate cert;
    cert.j = j;
    cert.d = d;
    cert.k_max = k_max;
    cert.holds = true;

    std::vector<int> alpha(static_cast<std::size_t>(d), 0);
    std::function<void(int, int)> sweep = [&](int coord, int remaining) {
        if (coord == d) {
            const int k = k_max - remaining;
            ++cert.multi_indices;
            const double v = hard_family_derivative(j, c, alpha, pre);
            if (v != 0.0) ++cert.nonzero;
            const double bound =
                std::pow(c, k) *
                std::pow(static_cast<double>(k), 0.5 * k); // 0^0 = 1
            const double ratio = (bound > 0.0)
                                     ? std::abs(v) / bound
                                     : (v == 0.0 ? 0.0 : std::numeric_limits<
                                                             double>::infinity());
            cert.worst_ratio = std::max(cert.worst_ratio, ratio);
            if (std::abs(v) > bound * (1.0 + 1e-12)) cert.holds = false;
            if (k == 1) {
                const int lone =
                    static_cast<int>(std::find(alpha.begin(), alpha.end(), 1) -
                                     alpha.begin());
                const double expect = (lone == j - 1) ? pre : 0.0;
                if (v != expect) cert.gradient_matches = false;
            }
            return;
        }
        for (int a = 0; a <= remaining; ++a) {
            alpha[static_cast<std::size_t>(coord)] = a;
            sweep(coord + 1, remaining - a);
        }
        alpha[static_cast<std::size_t>(coord)] = 0;
    };
    cert.gradient_matches = true;
    sweep(0, k_max);

    if (!cert.holds)
        throw InternalError("hard-family derivative exceeded its smoothness "
                            "bound; implementation bug");
    return cert;
}

} // namespace qgrad::bounds
