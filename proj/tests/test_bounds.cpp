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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "qgrad/bounds.hpp"
#include "qgrad/gradient.hpp"
#include "qgrad/grid.hpp"
#include "qgrad/rng.hpp"

using namespace qgrad;
using Catch::Approx;

TEST_CASE("hard family evaluations match the closed form", "[bounds]") {
    const std::vector<double> x = {1.0, 0.0, 0.0};
    CHECK(bounds::hard_family_eval(0, x, 0.1, 1.0) == 0.0);
    CHECK(bounds::hard_family_eval(1, x, 0.1, 1.0) ==
          Approx(0.2 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(bounds::hard_family_eval(2, x, 0.1, 1.0) == 0.0);

    // the sum of squares peaks at ||x|| = 1/c and equals 4 eps^2/(e c^2)
    const double c = 1.7;
    const double eps = 0.1;
    const int d = 3;
    const std::vector<double> peak = {1.0 / (c * std::sqrt(3.0)),
                                      1.0 / (c * std::sqrt(3.0)),
                                      1.0 / (c * std::sqrt(3.0))};
    double sum = 0.0;
    for (int j = 1; j <= d; ++j) {
        const double v = bounds::hard_family_eval(j, peak, eps, c);
        sum += v * v;
    }
    CHECK(sum == Approx(4.0 * eps * eps / (std::exp(1.0) * c * c))
                     .epsilon(1e-12));

    CHECK_THROWS_AS(bounds::hard_family_eval(4, x, 0.1, 1.0), DomainError);
    CHECK_THROWS_AS(bounds::hard_family_eval(-1, x, 0.1, 1.0), DomainError);
    CHECK_THROWS_AS(bounds::hard_family_eval(1, x, -0.1, 1.0), DomainError);
    const std::vector<double> bad = {
        std::numeric_limits<double>::infinity(), 0.0, 0.0};
    CHECK_THROWS_AS(bounds::hard_family_eval(1, bad, 0.1, 1.0), DomainError);
}

TEST_CASE("hard family sum never exceeds its envelope", "[bounds]") {
    const int d = 3;
    std::mt19937_64 gen(combine_seed(20260312, hash_string("hard-family")));
    const struct {
        double eps;
        double c;
    } cases[] = {{0.1, 1.0}, {0.05, 0.5}, {0.2, 2.0}};
    for (const auto &cs : cases) {
        const double envelope =
            4.0 * cs.eps * cs.eps / (std::exp(1.0) * cs.c * cs.c);
        int violations = 0;
        for (int t = 0; t < 20000; ++t) {
            std::vector<double> x(d);
            if (t % 2 == 0) {
                for (double &xi : x) xi = gaussian(gen) * 2.0 / cs.c;
            } else {
                const double span = 10.0 / (cs.c * std::sqrt(3.0));
                for (double &xi : x) xi = uniform_in(gen, -span, span);
            }
            double sum = 0.0;
            for (int j = 1; j <= d; ++j) {
                const double v = bounds::hard_family_eval(j, x, cs.eps, cs.c);
                sum += v * v;
            }
            if (sum > envelope * (1.0 + 1e-12)) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("hybrid evaluator matches hand-computed tables", "[bounds]") {
    SECTION("constant distance two") {
        // 4 functions, 7 points, |f - ref| = 2 everywhere: T = 2/3/4 = 1/6
        const std::vector<std::vector<double>> fam(
            4, std::vector<double>(7, 2.0));
        const std::vector<double> ref(7, 0.0);
        const auto out = bounds::hybrid_lower_bound(fam, ref);
        CHECK_FALSE(out.infinite);
        CHECK(out.max_sum == Approx(16.0));
        CHECK(out.value == Approx(1.0 / 6.0).epsilon(1e-14));
    }
    SECTION("distances clip at two") {
        const std::vector<std::vector<double>> fam(
            4, std::vector<double>(7, 5.0));
        const std::vector<double> ref(7, 0.0);
        const auto out = bounds::hybrid_lower_bound(fam, ref);
        CHECK(out.max_sum == Approx(16.0));
        CHECK(out.value == Approx(1.0 / 6.0).epsilon(1e-14));
    }
    SECTION("identical family yields an infinite bound") {
        const std::vector<std::vector<double>> fam(1,
                                                   std::vector<double>(3, 0.7));
        const std::vector<double> ref(3, 0.7);
        const auto out = bounds::hybrid_lower_bound(fam, ref);
        CHECK(out.infinite);
        CHECK(std::isinf(out.value));
    }
    SECTION("adding points never raises the bound") {
        std::mt19937_64 gen(
            combine_seed(20260312, hash_string("hybrid-monotone")));
        std::vector<std::vector<double>> fam(
            3, std::vector<double>(30));
        std::vector<double> ref(30);
        for (auto &row : fam)
            for (double &v : row) v = uniform_in(gen, -3.0, 3.0);
        for (double &v : ref) v = uniform_in(gen, -3.0, 3.0);
        double prev = std::numeric_limits<double>::infinity();
        for (std::size_t cut = 5; cut <= 30; cut += 5) {
            std::vector<std::vector<double>> sub;
            for (const auto &row : fam)
                sub.emplace_back(row.begin(),
                                 row.begin() + static_cast<long>(cut));
            const std::vector<double> subref(
                ref.begin(), ref.begin() + static_cast<long>(cut));
            const auto out = bounds::hybrid_lower_bound(sub, subref);
            CHECK(out.value <= prev + 1e-15);
            prev = out.value;
        }
    }
    SECTION("malformed tables") {
        CHECK_THROWS_AS(
            bounds::hybrid_lower_bound({}, std::vector<double>{1.0}),
            ConfigError);
        CHECK_THROWS_AS(
            bounds::hybrid_lower_bound({{1.0, 2.0}}, std::vector<double>{}),
            ConfigError);
        CHECK_THROWS_AS(bounds::hybrid_lower_bound(
                            {{1.0, 2.0}, {1.0}}, std::vector<double>{0.0, 0.0}),
                        ConfigError);
    }
}

TEST_CASE("hybrid bound on the hard family hits the radial constant",
          "[bounds]") {
    const double eps = 0.1;
    const double c = 1.0;
    for (int d : {1, 4}) {
        std::vector<std::vector<double>> points;
        for (int i = 0; i <= 3000; ++i) {
            std::vector<double> x(static_cast<std::size_t>(d), 0.0);
            x[0] = 1e-3 * i; // radius up to 3/c along one axis
            points.push_back(std::move(x));
        }
        const auto fam = bounds::hard_family_table(d, eps, c, points);
        const std::vector<double> ref(points.size(), 0.0);
        const auto out = bounds::hybrid_lower_bound(fam, ref);
        const double predicted =
            std::sqrt(std::exp(1.0)) / 6.0 * c * std::sqrt(d) / eps;
        CHECK(out.value == Approx(predicted).epsilon(5e-3));
        CHECK(out.value >= std::sqrt(d * std::exp(1.0)) / (6.0 * eps) *
                               (1.0 - 1e-6));
        // the closed-form constant is the weaker of the two
        CHECK(bounds::gradient_lower_bound(c, eps, d) <= out.value);
    }
}

TEST_CASE("gradient lower bound formula and premise", "[bounds]") {
    CHECK(bounds::gradient_lower_bound(1.0, 0.1, 4) == 5.0);
    CHECK(bounds::gradient_lower_bound(0.2, 0.1, 9) == Approx(1.5));
    CHECK(bounds::gradient_lower_bound(2.0, 1.0, 1) == Approx(0.5));
    CHECK_THROWS_AS(bounds::gradient_lower_bound(1.0, 0.6, 1), ConfigError);
    CHECK_THROWS_AS(bounds::gradient_lower_bound(-1.0, 0.1, 1), DomainError);
    CHECK_THROWS_AS(bounds::gradient_lower_bound(1.0, 0.1, 0), DomainError);
}

TEST_CASE("derivative factors at the origin", "[bounds]") {
    const double c = 1.3;
    SECTION("spot values") {
        // third derivative along the member coordinate: -3 c^3
        const std::vector<int> a3 = {0, 3, 0};
        CHECK(bounds::hard_family_derivative(2, c, a3) ==
              Approx(-3.0 * c * c * c).epsilon(1e-14));
        // odd multiplicity off the member coordinate vanishes
        const std::vector<int> a11 = {1, 1, 0};
        CHECK(bounds::hard_family_derivative(1, c, a11) == 0.0);
        // even multiplicity off the member coordinate contributes -c^2
        const std::vector<int> a21 = {2, 1, 0};
        CHECK(bounds::hard_family_derivative(2, c, a21) ==
              Approx(-c * c * c).epsilon(1e-14));
        // even multiplicity on the member coordinate vanishes
        const std::vector<int> a2 = {2, 0, 0};
        CHECK(bounds::hard_family_derivative(1, c, a2) == 0.0);
        // first derivative is the prefactor itself
        const std::vector<int> a1 = {1, 0, 0};
        CHECK(bounds::hard_family_derivative(1, c, a1) == Approx(c));
        CHECK(bounds::hard_family_derivative(1, c, a1, 0.2) == Approx(0.2));
    }
    SECTION("certificate sweeps hold") {
        const auto cert =
            bounds::hard_family_derivative_certificate(2, c, 8, 3);
        CHECK(cert.holds);
        CHECK(cert.gradient_matches);
        CHECK(cert.worst_ratio <= 1.0);
        CHECK(cert.worst_ratio > 0.0);
        CHECK(cert.multi_indices == 165); // C(11,3) alphas of order <= 8
        CHECK(cert.nonzero > 0);

        // distinguishing-family normalization under the premise 2 eps <= c
        const auto cert2 =
            bounds::hard_family_derivative_certificate(1, 1.0, 6, 2, 0.2);
        CHECK(cert2.holds);
        CHECK(cert2.gradient_matches);
    }
    SECTION("domain checks") {
        CHECK_THROWS_AS(
            bounds::hard_family_derivative_certificate(1, 1.0, 9, 2),
            DomainError);
        CHECK_THROWS_AS(
            bounds::hard_family_derivative_certificate(3, 1.0, 4, 2),
            DomainError);
        const std::vector<int> neg = {-1, 0};
        CHECK_THROWS_AS(bounds::hard_family_derivative(1, 1.0, neg),
                        DomainError);
    }
}

TEST_CASE("pipeline cost dominates the hybrid bound on its own grid",
          "[bounds]") {
    const int d = 2;
    const double eps = 0.1;
    const double c = 1.0;
    const auto params = grad::select_parameters(d, eps, 1.0 / 3.0, c);

    grid::GridSpec spec;
    spec.n = params.n;
    spec.d = d;
    spec.r = params.r;
    spec.y = {0.0, 0.0};
    const auto points = grid::evaluation_points(spec);
    const auto fam = bounds::hard_family_table(d, eps, c, points);
    const std::vector<double> ref(points.size(), 0.0);
    const auto lower = bounds::hybrid_lower_bound(fam, ref);
    REQUIRE_FALSE(lower.infinite);

    auto ledger = oracles::make_ledger();
    auto f1 = [&](std::span<const double> p) {
        return bounds::hard_family_eval(1, p, eps, c);
    };
    const std::vector<double> y = {0.0, 0.0};
    const auto report = grad::estimate_gradient_smooth(
        f1, y, d, eps, 1.0 / 3.0, c,
        combine_seed(20260312, hash_string("sandwich")), ledger);

    const double slack =
        64.0 * std::pow(std::log(static_cast<double>(d) / eps), 2.0);
    CHECK(static_cast<double>(report.phase_query_units) >=
          lower.value / slack);
}
