// SPDX-License-Identifier: Apache-2.0
//
// csinfer - remote CSI inference toolkit
// Copyright (C) 2026 csinfer contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "csinfer/rng.hpp"

using csinfer::Rng;

TEST_CASE("same seed replays the identical stream") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    for (int i = 0; i < 1000; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("different seeds diverge") {
    Rng a(1), b(2);
    int equal = 0;
    for (int i = 0; i < 100; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("uniform stays in [0, 1) with correct moments") {
    Rng rng(7);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum_sq += u * u;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("normal has unit variance and near-zero excess kurtosis") {
    Rng rng(11);
    const int n = 200000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m1) < 0.01);
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m4 / (m2 * m2) - 3.0 == doctest::Approx(0.0).epsilon(1.0).scale(0.1));
}

TEST_CASE("cnormal has unit total variance split across parts") {
    Rng rng(13);
    const int n = 100000;
    double vr = 0, vi = 0;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.cnormal();
        vr += z.real() * z.real();
        vi += z.imag() * z.imag();
    }
    CHECK(vr / n == doctest::Approx(0.5).epsilon(0.03));
    CHECK(vi / n == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("derived stream seeds are distinct and deterministic") {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 100; ++s) seeds.push_back(Rng::derive(42, s));
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j) CHECK(seeds[i] != seeds[j]);
    CHECK(Rng::derive(42, 7) == Rng::derive(42, 7));
    CHECK(Rng::derive(42, 7) != Rng::derive(43, 7));
}
