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

#include "qgrad/grid.hpp"

using namespace qgrad;

TEST_CASE("single-register labels", "[grid]") {
    SECTION("n=1") {
        const auto l = grid::labels(1);
        REQUIRE(l.size() == 2);
        REQUIRE(l[0] == -0.25);
        REQUIRE(l[1] == 0.25);
    }
    SECTION("n=2") {
        const auto l = grid::labels(2);
        REQUIRE(l == std::vector<double>{-0.375, -0.125, 0.125, 0.375});
    }
    SECTION("structure for n up to 10") {
        for (int n = 1; n <= 10; ++n) {
            const auto l = grid::labels(n);
            const auto N = static_cast<std::size_t>(grid::register_size(n));
            REQUIRE(l.size() == N);
            const double step = 1.0 / static_cast<double>(N);
            for (std::size_t j = 0; j < N; ++j) {
                REQUIRE(l[j] > -0.5);
                REQUIRE(l[j] < 0.5);
                REQUIRE(l[j] != 0.0);
                // symmetric about zero
                REQUIRE(l[j] == -l[N - 1 - j]);
                if (j > 0) REQUIRE(l[j] - l[j - 1] == step);
            }
        }
    }
}

TEST_CASE("nearest label index", "[grid]") {
    SECTION("tie at zero goes to the smaller index") {
        REQUIRE(grid::nearest_index(2, 0.0) == 1);
    }
    SECTION("plain nearest") {
        REQUIRE(grid::nearest_index(2, 0.3) == 3);
        REQUIRE(grid::nearest_index(2, -0.5) == 0);
        REQUIRE(grid::nearest_index(2, 0.5) == 3);
    }
    SECTION("roundtrip on every label") {
        for (int n : {1, 2, 5, 8}) {
            const auto l = grid::labels(n);
            for (std::size_t j = 0; j < l.size(); ++j) {
                REQUIRE(grid::nearest_index(n, l[j]) ==
                        static_cast<std::int64_t>(j));
            }
        }
    }
    SECTION("out of range rejected") {
        REQUIRE_THROWS_AS(grid::nearest_index(3, 0.51), DomainError);
        REQUIRE_THROWS_AS(grid::nearest_index(3, -2.0), DomainError);
    }
}

TEST_CASE("evaluation points", "[grid]") {
    SECTION("n=1 d=1 shifted and scaled") {
        grid::GridSpec spec{1, 1, 2.0, {5.0}};
        const auto pts = grid::evaluation_points(spec);
        REQUIRE(pts.size() == 2);
        REQUIRE(pts[0][0] == 4.5);
        REQUIRE(pts[1][0] == 5.5);
    }
    SECTION("register-major flat order, register 0 most significant") {
        grid::GridSpec spec{2, 2, 1.0, {0.0, 0.0}};
        const auto pts = grid::evaluation_points(spec);
        REQUIRE(pts.size() == 16);
        REQUIRE(pts[0] == std::vector<double>{-0.375, -0.375});
        REQUIRE(pts[1] == std::vector<double>{-0.375, -0.125});
        REQUIRE(pts[4] == std::vector<double>{-0.125, -0.375});
        REQUIRE(pts[15] == std::vector<double>{0.375, 0.375});
    }
    SECTION("flat decode matches enumeration") {
        grid::GridSpec spec{3, 2, 0.5, {1.0, -1.0}};
        grid::for_each_point(spec, [&](std::uint64_t flat,
                                       std::span<const double> lv,
                                       std::span<const double>) {
            const auto decoded = grid::labels_of_flat(spec, flat);
            for (int i = 0; i < spec.d; ++i) REQUIRE(decoded[i] == lv[i]);
        });
    }
}

TEST_CASE("grid spec validation and JSON", "[grid]") {
    grid::GridSpec spec{4, 2, 0.125, {0.5, -0.25}};
    const std::string text = spec.to_json();
    const auto back = grid::GridSpec::from_json(text);
    REQUIRE(back.n == spec.n);
    REQUIRE(back.d == spec.d);
    REQUIRE(back.r == spec.r);
    REQUIRE(back.y == spec.y);

    REQUIRE_THROWS_AS(grid::GridSpec::from_json("{\"n\":1}"), ConfigError);
    REQUIRE_THROWS_AS((grid::GridSpec{1, 1, -1.0, {0.0}}).validate(),
                      ConfigError);
    REQUIRE_THROWS_AS((grid::GridSpec{1, 1, 1.0, {0.0, 0.0}}).validate(),
                      ConfigError);
    REQUIRE_THROWS_AS((grid::GridSpec{14, 2, 1.0, {0.0, 0.0}}).validate(),
                      ResourceError);
    REQUIRE_THROWS_AS(grid::labels(0), ConfigError);
}
