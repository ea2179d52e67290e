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
#include <numbers>
#include <vector>

#include "csinfer/estimator.hpp"

using namespace csinfer;
using std::numbers::pi;

namespace {

geo::UlaConfig make_array(int m, double wavelength = 0.1) {
    geo::UlaConfig a;
    a.num_elements = m;
    a.wavelength = wavelength;
    a.spacing = wavelength / 2.0;
    return a;
}

}  // namespace

TEST_CASE("noiseless snapshot recovers angle, amplitude, phase and range") {
    const auto array = make_array(16);
    const double d = 120.0;
    const double g = array.wavelength / (4.0 * pi * d);
    const double p_tx = 1.0 / (g * g);  // unit per-element receive power
    const double rho = g * std::sqrt(p_tx * array.num_elements);
    const double theta0 = 1.234, phi0 = 0.77;
    const auto snaps = ring::synth_los_snapshots(array, theta0, rho, phi0, 0.0, 1, 3);
    const auto est = est::estimate_los(snaps, array, p_tx);
    CHECK(std::abs(est.theta_hat - theta0) < 1e-7);
    CHECK(est.rho_hat == doctest::Approx(rho).epsilon(1e-9));
    CHECK(est.phi_hat == doctest::Approx(phi0).epsilon(1e-6));
    CHECK(est.d_hat == doctest::Approx(d).epsilon(1e-6));
}

TEST_CASE("angle estimate stays inside the semi-disk convention") {
    const auto array = make_array(8);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const double theta0 = rng.uniform(0.05, pi - 0.05);
        const auto snaps = ring::synth_los_snapshots(array, theta0, 1.0, 0.0, 0.5, 10,
                                                     1000 + i);
        const auto est = est::estimate_los(snaps, array, 1.0);
        CHECK(est.theta_hat > 0.0);
        CHECK(est.theta_hat < pi);
    }
}

TEST_CASE("mirrored snapshots average to the coherent mean") {
    // {y, 2 ybar - y} has the same coherent average as {ybar}
    const auto array = make_array(12);
    const auto noisy = ring::synth_los_snapshots(array, 0.9, 2.0, 0.3, 1.0, 1, 17);
    ring::ChannelSnapshot y = noisy[0];
    const auto clean = ring::synth_los_snapshots(array, 0.9, 2.0, 0.3, 0.0, 1, 17);
    ring::ChannelSnapshot ybar = clean[0];

    ring::ChannelSnapshot mirror = y;
    mirror.values = 2.0 * ybar.values - y.values;
    const std::vector<ring::ChannelSnapshot> pair{y, mirror};
    const std::vector<ring::ChannelSnapshot> single{ybar};
    const auto a = est::estimate_los(pair, array, 4.0);
    const auto b = est::estimate_los(single, array, 4.0);
    CHECK(a.theta_hat == doctest::Approx(b.theta_hat).epsilon(1e-10));
    CHECK(a.rho_hat == doctest::Approx(b.rho_hat).epsilon(1e-10));
}

TEST_CASE("estimator equivariance under a common angle shift on noiseless input") {
    const auto array = make_array(16);
    const double c = 0.35;
    for (double theta0 : {0.6, 1.1, 2.2}) {
        const auto a = est::estimate_los(
            ring::synth_los_snapshots(array, theta0, 1.5, 0.2, 0.0, 1, 1), array, 2.25);
        const auto b = est::estimate_los(
            ring::synth_los_snapshots(array, theta0 + c, 1.5, 0.2, 0.0, 1, 1), array, 2.25);
        CHECK(b.theta_hat - a.theta_hat == doctest::Approx(c).epsilon(1e-6));
    }
}

TEST_CASE("golden-section refinement never worsens the coarse objective") {
    const auto array = make_array(16);
    Rng rng(23);
    for (int i = 0; i < 30; ++i) {
        const double theta0 = rng.uniform(0.1, pi - 0.1);
        const auto snaps =
            ring::synth_los_snapshots(array, theta0, 1.0, 0.0, 2.0, 5, 400 + i);
        const auto est = est::estimate_los(snaps, array, 1.0);

        // recompute the best coarse-grid objective independently
        Eigen::VectorXcd ybar = Eigen::VectorXcd::Zero(array.num_elements);
        for (const auto& s : snaps) ybar += s.values;
        ybar /= static_cast<double>(snaps.size());
        const int grid = 4 * array.num_elements;
        double best = 0.0;
        for (int gidx = 0; gidx < grid; ++gidx) {
            const double theta = pi * (gidx + 1) / (grid + 1);
            const auto e = geo::steering_vector(array, theta);
            best = std::max(best, std::norm(e.dot(ybar)));
        }
        CHECK(est.log_likelihood >= best - 1e-12 * best);
    }
}

TEST_CASE("input validation") {
    const auto array = make_array(4);
    CHECK_THROWS(est::estimate_los(std::vector<ring::ChannelSnapshot>{}, array, 1.0));
    std::vector<ring::ChannelSnapshot> zeros(2);
    for (auto& s : zeros) {
        s.values = Eigen::VectorXcd::Zero(4);
        s.clean = s.values;
    }
    CHECK_THROWS_AS(est::estimate_los(zeros, array, 1.0), NoSignalError);
}

TEST_CASE("moderate Monte Carlo efficiency at high SNR") {
    // light version of the efficiency experiment: M=32, K=100, SNR 20 dB
    const auto array = make_array(32);
    const double snr = 100.0;
    const double d = 100.0;
    const double g = array.wavelength / (4.0 * pi * d);
    const double noise = 1.0;
    const double p_tx = snr * noise / (g * g);
    const double rho = g * std::sqrt(p_tx * array.num_elements);
    const double theta0 = pi / 3.0;
    const int k = 100, trials = 200;

    double sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto snaps =
            ring::synth_los_snapshots(array, theta0, rho, 0.4, noise, k, 9000 + t);
        const auto est = est::estimate_los(snaps, array, p_tx);
        sq += std::pow(est.theta_hat - theta0, 2);
    }
    const double mse = sq / trials;
    const double crb = crlb::crlb_los_snr_form(32, k, snr, d, theta0).theta_lc;
    CHECK(mse / crb > 0.6);   // not below the bound beyond Monte Carlo noise
    CHECK(mse / crb < 2.0);   // efficient at high SNR
}
