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

/**
 * @file stencil.hpp
 * High-degree central-difference schemes. The degree-2m scheme combines
 * evaluations at -m..m multiples of a displacement into a directional
 * derivative estimate that is exact on polynomials of degree <= 2m, with
 * coefficient mass growing only logarithmically in m.
 */

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qgrad/errors.hpp"

namespace qgrad::stencil {

inline constexpr int kMaxOrder = 10000;

/**
 * @brief Antisymmetric coefficient table a_{-m}..a_m of the degree-2m scheme.
 *
 * a_0 = 0 and a_l = ((-1)^(l-1) / l) * C(m,l) / C(m+l,l) for l > 0.
 */
struct DifferenceScheme {
    int m = 0;
    std::vector<double> a; // size 2m+1, a[m + l] holds a_l

    double at(int l) const { return a[static_cast<std::size_t>(m + l)]; }
    /// Sum over all l of |a_l| (= 2 * sum over positive l).
    double total_abs() const;
};

/// Coefficients for 1 <= m <= kMaxOrder, built by an exact term ratio.
DifferenceScheme central_coefficients(int m);

using PointFn = std::function<double(std::span<const double>)>;

/// Sum_l a_l f(l * x) for a d-dimensional displacement x.
double apply_scheme(const PointFn &f, const DifferenceScheme &scheme,
                    std::span<const double> x);

/// One-dimensional convenience overload.
double apply_scheme_1d(const std::function<double(double)> &f,
                       const DifferenceScheme &scheme, double delta);

/// |f'(0) delta - scheme value| bound for |f^(2m+1)| <= B on the segment:
/// exp(-m/2) * B * |delta|^(2m+1).
double lagrange_error_bound(int m, double B, double delta);

/// Directional bound for d-dimensional x under the same derivative scale.
double multidim_error_bound(int m, double B, double x_norm);

/// Sum over positive l of |a_l| together with its ln(m)+1 envelope.
struct L1Mass {
    double sum = 0.0;
    double bound = 0.0;
    bool holds = false;
};
L1Mass coefficient_l1(int m);

/**
 * @brief Sum over l of |a_l l^(k+1)| against 6 exp(-7m/6) m^(k+3/2).
 *
 * Requires k >= 2m. Values are tracked in log space as well so the
 * comparison stays meaningful when the linear values overflow.
 */
struct PowerSum {
    double sum = 0.0;      // +inf when overflowed
    double bound = 0.0;    // +inf when overflowed
    double log_sum = 0.0;  // natural log, always finite
    double log_bound = 0.0;
    bool holds = false;
    bool overflowed = false;
};
PowerSum coefficient_power_sum(int m, int k);

/// Tail mass sum_{k >= 2m+1} q^k with q = 8 R c m sqrt(d).
struct TailBound {
    double q = 0.0;
    double value = 0.0; // +inf when q >= 1
    bool finite = false;
};
TailBound analytic_tail_bound(double R, double c, int m, int d);

} // namespace qgrad::stencil
