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

#include "csinfer/one_ring.hpp"

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

ring::RingModel make_ring(double distance = 100.0, double radius = 5.0,
                          double wavelength = 0.1, double theta = pi / 3.0) {
    ring::RingModel model;
    model.center = distance * Eigen::Vector2d{std::cos(theta), std::sin(theta)};
    model.radius = radius;
    model.mean_aoa = theta;
    model.angular_spread = std::asin(radius / distance);
    model.gain = wavelength / (4.0 * pi * distance);
    model.distance = distance;
    return model;
}

}  // namespace

TEST_CASE("ring_model_for_site derives spread and gain from geometry") {
    const Eigen::Vector2d site{0, 0}, term{0, 100};
    const auto model = ring::ring_model_for_site(term, site, 5.0, 0.1);
    CHECK(model.mean_aoa == doctest::Approx(pi / 2.0));
    CHECK(model.angular_spread == doctest::Approx(std::asin(0.05)).epsilon(1e-9));
    CHECK(model.gain == doctest::Approx(0.1 / (4.0 * pi * 100.0)));
    CHECK_THROWS_AS(ring::ring_model_for_site(term, site, 150.0, 0.1),
                    DegenerateGeometryError);
}

TEST_CASE("aps_ring center value and out-of-support convention") {
    CHECK(ring::aps_ring(0.3, 0.3, 0.05) == doctest::Approx(2.0 / 0.05));
    CHECK(ring::aps_ring(0.3 + 0.0501, 0.3, 0.05) == 0.0);
    CHECK(ring::aps_ring(0.3 - 0.06, 0.3, 0.05) == 0.0);
    // diverges approaching the support edge
    CHECK(ring::aps_ring(0.3 + 0.05 * 0.999999, 0.3, 0.05) > 1e4);
}

TEST_CASE("squared APS integrates to gain^2 over the truncated support") {
    const auto model = make_ring();
    // integral of S^2 via the substitution v = atanh(offset/gamma_max):
    // d(offset) = gamma_max (1 - tanh^2 v) dv and S^2 = g^2 c^2 mu^2 p^2,
    // evaluated here with plain midpoint in v at high resolution.
    const int n = 200000;
    const double v_lim = ring::kRingTruncationV;
    double integral = 0.0;
    for (int j = 0; j < n; ++j) {
        const double v = -v_lim + 2.0 * v_lim * (j + 0.5) / n;
        const double off = model.angular_spread * std::tanh(v);
        const double s = ring::aps_value(model, model.mean_aoa + off);
        const double jac = model.angular_spread * (1.0 - std::pow(std::tanh(v), 2));
        integral += s * s * jac * 2.0 * v_lim / n;
    }
    CHECK(integral == doctest::Approx(model.gain * model.gain).epsilon(1e-6));
}

TEST_CASE("ring quadrature weights are normalized and symmetric") {
    const auto model = make_ring();
    const auto q = ring::ring_quadrature(model, 256);
    double sum = 0.0;
    for (double w : q.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const std::size_t n = q.offsets.size();
    for (std::size_t j = 0; j < n / 2; ++j) {
        CHECK(q.offsets[j] == doctest::Approx(-q.offsets[n - 1 - j]).epsilon(1e-12));
        CHECK(std::abs(q.offsets[j]) < model.angular_spread);
    }
}

TEST_CASE("synth_exact single path reproduces Friis magnitude") {
    auto model = make_ring(100.0, 5.0);
    model.scatterer_angles = {pi / 2.0};  // scatterer at center + r*(0,1)
    const auto array = make_array(1);
    Rng rng(1);
    const auto snap = ring::synth_exact(model, array, 4.0, 0.0, {}, rng);
    const Eigen::Vector2d scat = model.center + 5.0 * Eigen::Vector2d{0.0, 1.0};
    const double d = 5.0 + scat.norm();
    CHECK(std::abs(snap.values[0]) ==
          doctest::Approx(2.0 * 0.1 / (4.0 * pi * d)).epsilon(1e-12));
}

TEST_CASE("synth_exact with no paths is the zero vector") {
    auto model = make_ring();
    model.scatterer_angles.clear();
    const auto array = make_array(4);
    Rng rng(1);
    const auto snap = ring::synth_exact(model, array, 4.0, 0.0, {}, rng);
    CHECK(snap.values.norm() == 0.0);
}

TEST_CASE("synth_exact phase error against far-field stays under the quadratic bound") {
    // D = 200 m, r_max = 5 m, M = 8; wavelength chosen so the Rayleigh
    // curvature term is negligible against the ring-curvature bound.
    const double wavelength = 0.01;
    const double distance = 200.0, radius = 5.0;
    const int m = 8;
    auto array = make_array(m, wavelength);
    auto model = make_ring(distance, radius, wavelength);

    Rng rng(5);
    const int k_sc = 32;
    std::vector<double> betas(k_sc), aoas(k_sc), phases(k_sc, 0.0);
    std::vector<double> exact_phase_offsets(k_sc);
    const double bound =
        2.0 * pi * array.spacing * m * radius * radius / (wavelength * distance * distance);

    for (int s = 0; s < k_sc; ++s) betas[s] = rng.uniform(0.0, 2.0 * pi);

    // Compare per path: one scatterer at a time, element-wise phase difference
    // between the exact spherical sum and the plane-wave form.
    for (int s = 0; s < k_sc; ++s) {
        auto single = model;
        single.scatterer_angles = {betas[s]};
        Rng r2(7);
        const auto exact = ring::synth_exact(single, array, 1.0, 0.0, {}, r2);
        const Eigen::Vector2d scat =
            model.center + radius * Eigen::Vector2d{std::cos(betas[s]), std::sin(betas[s])};
        const auto polar = geo::aoa_and_range({0.0, 0.0}, scat);
        const double gamma = polar.aoa;
        for (int i = 0; i < m; ++i) {
            const double exact_phase = std::arg(exact.clean[i] / exact.clean[0]);
            const double plane_phase = std::remainder(
                -2.0 * pi * array.spacing * i * std::cos(gamma) / wavelength, 2.0 * pi);
            const double diff = std::remainder(exact_phase - plane_phase, 2.0 * pi);
            CHECK(std::abs(diff) < bound);
        }
    }
}

TEST_CASE("synth_farfield single path equals a scaled steering vector") {
    auto model = make_ring();
    const auto array = make_array(4);
    Rng rng(1);
    const double theta = model.mean_aoa;
    const auto snap =
        ring::synth_farfield(model, array, 9.0, 0.0, std::vector<double>{theta},
                             std::vector<double>{0.0}, rng, true);
    const auto e = geo::steering_vector(array, theta);
    const Eigen::VectorXcd expected = model.gain * 3.0 * 2.0 * e;  // g sqrt(P M) e
    CHECK((snap.values - expected).norm() < 1e-12);
}

TEST_CASE("synth_farfield common phase shift factors out") {
    auto model = make_ring();
    const auto array = make_array(4);
    std::vector<double> aoas{1.0, 1.05, 0.95};
    std::vector<double> phases{0.3, 1.7, 2.9};
    Rng r1(1), r2(1);
    const auto a = ring::synth_farfield(model, array, 1.0, 0.0, aoas, phases, r1, true);
    const double c = 0.77;
    for (auto& p : phases) p += c;
    const auto b = ring::synth_farfield(model, array, 1.0, 0.0, aoas, phases, r2, true);
    const std::complex<double> rot = std::polar(1.0, c);
    CHECK((b.values - rot * a.values).norm() < 1e-12 * a.values.norm());
}

TEST_CASE("synth_farfield two-path hand sum at M=4") {
    auto model = make_ring();
    model.gain = 0.5;
    const auto array = make_array(4);
    const std::vector<double> aoas{0.9, 2.0};
    const std::vector<double> phases{0.25, 1.5};
    Rng rng(1);
    const auto snap = ring::synth_farfield(model, array, 2.0, 0.0, aoas, phases, rng, true);
    const double amp = 0.5 * std::sqrt(2.0 / 2.0);
    for (int i = 0; i < 4; ++i) {
        std::complex<double> expect{0.0, 0.0};
        for (int s = 0; s < 2; ++s)
            expect += amp * std::polar(1.0, -2.0 * pi * array.spacing * i *
                                                    std::cos(aoas[s]) / array.wavelength +
                                                phases[s]);
        CHECK(std::abs(snap.values[i] - expect) < 1e-12);
    }
}

TEST_CASE("synth_farfield enforces the far-field precondition unless forced") {
    auto model = make_ring(40.0, 5.0);  // D < 10 r_max
    const auto array = make_array(4);
    Rng rng(1);
    const std::vector<double> aoas{1.0}, phases{0.0};
    CHECK_THROWS_AS(ring::synth_farfield(model, array, 1.0, 0.0, aoas, phases, rng, false),
                    FarFieldPreconditionError);
    CHECK_NOTHROW(ring::synth_farfield(model, array, 1.0, 0.0, aoas, phases, rng, true));
}

TEST_CASE("snapshot noise has the configured per-element variance") {
    auto model = make_ring();
    const auto array = make_array(4);
    const double noise_var = 2.5;
    const auto snaps = ring::draw_snapshots(model, array, 1.0, noise_var, 20000, 31);
    double acc = 0.0;
    for (const auto& s : snaps) acc += (s.values - s.clean).squaredNorm();
    const double per_element = acc / (20000.0 * 4.0);
    CHECK(per_element == doctest::Approx(noise_var).epsilon(0.03));
}

TEST_CASE("covariance diagonal equals P g^2 + noise and LoS limit is rank one") {
    auto model = make_ring();
    const auto array = make_array(8);
    const double p_tx = 3.0, noise_var = 0.4;
    const auto cov = ring::covariance_analytic(model, array, p_tx, noise_var);
    const double diag = p_tx * model.gain * model.gain + noise_var;
    for (int i = 0; i < 8; ++i)
        CHECK(cov.matrix(i, i).real() == doctest::Approx(diag).epsilon(1e-9));
    CHECK(cov.is_hermitian());
    CHECK(cov.min_eigenvalue() > -1e-9 * cov.matrix.real().trace());

    auto los = model;
    los.aps_kind = ring::ApsKind::Los;
    los.radius = 0.0;
    los.angular_spread = 0.0;
    const auto cl = ring::covariance_analytic(los, array, p_tx, 0.0);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            const auto expect =
                p_tx * los.gain * los.gain *
                std::polar(1.0, -2.0 * pi * array.spacing * (r - c) *
                                    std::cos(los.mean_aoa) / array.wavelength);
            CHECK(std::abs(cl.matrix(r, c) - expect) < 1e-12);
        }
}

TEST_CASE("exact and small-angle covariance forms agree, error shrinking as gamma_max^2") {
    // The linearization cos(g + theta) ~ cos(theta) - g sin(theta) leaves a
    // residual phase ~ A g^2 cos(theta) / 2 per entry, so the Frobenius gap
    // is O(gamma_max^2); at gamma_max = 0.05, M = 8, theta = pi/3 it sits
    // just under 5e-3.
    const auto array = make_array(8);
    auto err_at = [&](double gamma_max) {
        auto model = make_ring();
        model.angular_spread = gamma_max;
        model.radius = model.distance * std::sin(gamma_max);
        const auto a = ring::covariance_analytic(model, array, 1.0, 0.0);
        const auto bc = ring::covariance_analytic_smallangle(model, array, 1.0, 0.0);
        return (a.matrix - bc.matrix).norm() / a.matrix.norm();
    };
    const double e_05 = err_at(0.05);
    const double e_01 = err_at(0.01);
    CHECK(e_05 < 5e-3);
    CHECK(e_01 < 2.5e-4);
    // quadratic order: a 5x smaller spread shrinks the gap ~25x
    CHECK(e_05 / e_01 == doctest::Approx(25.0).epsilon(0.25));
}

TEST_CASE("covariance_sampled basics") {
    SUBCASE("single outer product") {
        ring::ChannelSnapshot s;
        s.values = Eigen::VectorXcd(2);
        s.values << std::complex<double>{1.0, 0.0}, std::complex<double>{0.0, 1.0};
        s.clean = s.values;
        const auto cov = ring::covariance_sampled(std::vector<ring::ChannelSnapshot>{s});
        CHECK(std::abs(cov.matrix(0, 0) - std::complex<double>{1.0, 0.0}) < 1e-15);
        CHECK(std::abs(cov.matrix(0, 1) - std::complex<double>{0.0, -1.0}) < 1e-15);
        CHECK(std::abs(cov.matrix(1, 0) - std::complex<double>{0.0, 1.0}) < 1e-15);
        CHECK(std::abs(cov.matrix(1, 1) - std::complex<double>{1.0, 0.0}) < 1e-15);
    }
    SUBCASE("all-zero snapshots give the zero matrix") {
        std::vector<ring::ChannelSnapshot> snaps(3);
        for (auto& s : snaps) {
            s.values = Eigen::VectorXcd::Zero(4);
            s.clean = s.values;
        }
        CHECK(ring::covariance_sampled(snaps).matrix.norm() == 0.0);
    }
    SUBCASE("empty list throws") {
        CHECK_THROWS(ring::covariance_sampled(std::vector<ring::ChannelSnapshot>{}));
    }
}

TEST_CASE("sample covariance converges to analytic at rate 1/sqrt(K)") {
    auto model = make_ring();
    const auto array = make_array(8);
    const double p_tx = 1.0 / (model.gain * model.gain);  // unit signal power
    const auto analytic = ring::covariance_analytic(model, array, p_tx, 0.0);

    double err[3];
    const int ks[3] = {1000, 10000, 100000};
    for (int i = 0; i < 3; ++i) {
        const auto snaps = ring::draw_snapshots(model, array, p_tx, 0.0, ks[i], 1234);
        const auto sampled = ring::covariance_sampled(snaps);
        err[i] = (sampled.matrix - analytic.matrix).norm() / analytic.matrix.norm();
        CHECK(sampled.is_hermitian());
        CHECK(sampled.min_eigenvalue() >= -1e-9 * sampled.matrix.real().trace());
    }
    // Each tenfold K should shrink the error by about sqrt(10).
    const double pred = std::sqrt(10.0);
    CHECK(err[0] / err[1] > 0.5 * pred);
    CHECK(err[0] / err[1] < 2.0 * pred);
    CHECK(err[1] / err[2] > 0.5 * pred);
    CHECK(err[1] / err[2] < 2.0 * pred);
    CHECK(err[2] < 0.02);
}

TEST_CASE("far-field per-element marginals are near-Gaussian for many paths") {
    auto model = make_ring();
    const auto array = make_array(2);
    const double p_tx = 1.0 / (model.gain * model.gain);
    const auto snaps = ring::draw_snapshots(model, array, p_tx, 0.0, 100000, 77);
    double m2r = 0, m4r = 0, m2i = 0, m4i = 0;
    for (const auto& s : snaps) {
        const double re = s.values[0].real(), im = s.values[0].imag();
        m2r += re * re;
        m4r += re * re * re * re;
        m2i += im * im;
        m4i += im * im * im * im;
    }
    const double n = static_cast<double>(snaps.size());
    const double kr = (m4r / n) / std::pow(m2r / n, 2);
    const double ki = (m4i / n) / std::pow(m2i / n, 2);
    CHECK(std::abs(kr - 3.0) < 0.3);
    CHECK(std::abs(ki - 3.0) < 0.3);
}

TEST_CASE("analytic covariance is invariant to a common path-phase rotation") {
    // The analytic form never sees the phases; assert the sampled one moves
    // only within Monte Carlo noise under a common rotation.
    auto model = make_ring();
    const auto array = make_array(4);
    Rng rng(41);
    const int k_sc = 100, count = 2000;
    std::vector<ring::ChannelSnapshot> plain, rotated;
    for (int idx = 0; idx < count; ++idx) {
        Rng r(Rng::derive(5150, idx));
        auto aoas = ring::draw_path_aoas(model, r, k_sc);
        std::vector<double> phases(k_sc);
        for (auto& p : phases) p = r.uniform(0.0, 2.0 * pi);
        Rng rn1(1), rn2(1);
        plain.push_back(ring::synth_farfield(model, array, 1.0, 0.0, aoas, phases, rn1, true));
        for (auto& p : phases) p += 1.234;
        rotated.push_back(ring::synth_farfield(model, array, 1.0, 0.0, aoas, phases, rn2, true));
    }
    const auto ca = ring::covariance_sampled(plain);
    const auto cb = ring::covariance_sampled(rotated);
    CHECK((ca.matrix - cb.matrix).norm() < 1e-12 * ca.matrix.norm());
}

TEST_CASE("model validation rejects inconsistent los settings") {
    ring::RingModel model;
    model.aps_kind = ring::ApsKind::Los;
    model.radius = 1.0;
    CHECK_THROWS(model.validate());
    model.radius = 0.0;
    model.angular_spread = 0.0;
    CHECK_NOTHROW(model.validate());
}
