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

#include "qgrad/stencil.hpp"

#include <cmath>
#include <limits>

namespace qgrad::stencil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_m(int m) {
    if (m < 1 || m > kMaxOrder) {
        throw ConfigError("scheme order m must be in [1, " +
                          std::to_string(kMaxOrder) + "], got " +
                          std::to_string(m));
    }
}

/// log(sum exp(t_i)) accumulated incrementally.
double log_sum_exp(const std::vector<double> &t) {
    double mx = -kInf;
    for (double v : t) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double v : t) s += std::exp(v - mx);
    return mx + std::log(s);
}

} // namespace

double DifferenceScheme::total_abs() const {
    double s = 0.0;
    for (int l = 1; l <= m; ++l) s += std::abs(at(l));
    return 2.0 * s;
}

DifferenceScheme central_coefficients(int m) {
    check_m(m);
    DifferenceScheme s;
    s.m = m;
    s.a.assign(static_cast<std::size_t>(2 * m + 1), 0.0);
    // |a_1| = m/(m+1); successive magnitudes follow the exact integer ratio
    // |a_{l+1}| / |a_l| = l (m - l) / ((l + 1)(m + l + 1)).
    double mag = static_cast<double>(m) / static_cast<double>(m + 1);
    double sign = 1.0;
    for (int l = 1; l <= m; ++l) {
        s.a[static_cast<std::size_t>(m + l)] = sign * mag;
        s.a[static_cast<std::size_t>(m - l)] = -sign * mag;
        sign = -sign;
        mag *= static_cast<double>(l) * static_cast<double>(m - l);
        mag /= static_cast<double>(l + 1) * static_cast<double>(m + l + 1);
    }
    return s;
}

double apply_scheme(const PointFn &f, const DifferenceScheme &scheme,
                    std::span<const double> x) {
    std::vector<double> scaled(x.size());
    double acc = 0.0;
    for (int l = -scheme.m; l <= scheme.m; ++l) {
        if (l == 0) continue;
        for (std::size_t i = 0; i < x.size(); ++i) {
            scaled[i] = static_cast<double>(l) * x[i];
        }
        const double v = f(scaled);
        if (!std::isfinite(v)) {
            throw NumericError("non-finite evaluation in difference scheme");
        }
        acc += scheme.at(l) * v;
    }
    return acc;
}

double apply_scheme_1d(const std::function<double(double)> &f,
                       const DifferenceScheme &scheme, double delta) {
    return apply_scheme(
        [&](std::span<const double> p) { return f(p[0]); }, scheme,
        std::span<const double>(&delta, 1));
}

double lagrange_error_bound(int m, double B, double delta) {
    check_m(m);
    return std::exp(-0.5 * m) * B * std::pow(std::abs(delta), 2 * m + 1);
}

double multidim_error_bound(int m, double B, double x_norm) {
    check_m(m);
    return B * std::exp(-0.5 * m) * std::pow(x_norm, 2 * m + 1);
}

L1Mass coefficient_l1(int m) {
    const DifferenceScheme s = central_coefficients(m);
    L1Mass out;
    out.sum = 0.5 * s.total_abs();
    out.bound = std::log(static_cast<double>(m)) + 1.0;
    out.holds = out.sum <= out.bound;
    return out;
}

PowerSum coefficient_power_sum(int m, int k) {
    check_m(m);
    if (k < 2 * m) {
        throw DomainError("power-sum bound needs k >= 2m (k=" +
                          std::to_string(k) + ", m=" + std::to_string(m) + ")");
    }
    const DifferenceScheme s = central_coefficients(m);
    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(2 * m));
    for (int l = 1; l <= m; ++l) {
        const double la = std::log(std::abs(s.at(l)));
        const double lt = la + (k + 1.0) * std::log(static_cast<double>(l));
        log_terms.push_back(lt);
        log_terms.push_back(lt); // negative l contributes the same magnitude
    }
    PowerSum out;
    out.log_sum = log_sum_exp(log_terms);
    out.log_bound = std::log(6.0) - 7.0 * m / 6.0 +
                    (k + 1.5) * std::log(static_cast<double>(m));
    out.holds = out.log_sum <= out.log_bound;
    out.sum = std::exp(out.log_sum);
    out.bound = std::exp(out.log_bound);
    out.overflowed = !std::isfinite(out.sum) || !std::isfinite(out.bound);
    if (out.overflowed) {
        out.sum = kInf;
        out.bound = kInf;
    }
    return out;
}

TailBound analytic_tail_bound(double R, double c, int m, int d) {
    check_m(m);
    if (!(R >= 0.0) || !(c >= 0.0) || d < 1) {
        throw ConfigError("tail bound needs R >= 0, c >= 0, d >= 1");
    }
    TailBound out;
    out.q = 8.0 * R * c * m * std::sqrt(static_cast<double>(d));
    if (out.q >= 1.0) {
        out.value = kInf;
        out.finite = false;
        return out;
    }
    out.value = std::pow(out.q, 2 * m + 1) / (1.0 - out.q);
    out.finite = true;
    return out;
}

} // namespace qgrad::stencil
