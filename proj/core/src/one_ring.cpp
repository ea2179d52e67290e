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

#include "csinfer/one_ring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csinfer::ring {

using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

constexpr double kQuadratureRelTol = 1e-7;
constexpr int kQuadratureMaxNodes = 1 << 14;

/// Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration.
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

double visibility_at(const RingModel& model, double offset) {
    return model.visibility ? model.visibility(offset) : 1.0;
}

/// Toeplitz lag profile of the (a)-form covariance, one complex value per lag.
std::vector<cplx> lag_profile_exact(const RingModel& model, const geo::UlaConfig& array,
                                    const RingQuadrature& q) {
    const int m = array.num_elements;
    std::vector<cplx> lags(m);
    for (int d = 0; d < m; ++d) {
        const double a = 2.0 * pi * array.spacing * d / array.wavelength;
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < q.offsets.size(); ++j)
            acc += q.weights[j] * std::polar(1.0, -a * std::cos(model.mean_aoa + q.offsets[j]));
        lags[d] = acc;
    }
    return lags;
}

/// Small-angle (b)/(c)-form lag profile: carrier times Fourier-type integral
/// in the offset variable.
std::vector<cplx> lag_profile_smallangle(const RingModel& model, const geo::UlaConfig& array,
                                         const RingQuadrature& q) {
    const int m = array.num_elements;
    const double st = std::sin(model.mean_aoa);
    const double ct = std::cos(model.mean_aoa);
    std::vector<cplx> lags(m);
    for (int d = 0; d < m; ++d) {
        const double a = 2.0 * pi * array.spacing * d / array.wavelength;
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < q.offsets.size(); ++j)
            acc += q.weights[j] * std::polar(1.0, a * st * q.offsets[j]);
        lags[d] = std::polar(1.0, -a * ct) * acc;
    }
    return lags;
}

HermitianCovariance assemble_covariance(
    const RingModel& model, const geo::UlaConfig& array, double p_tx, double noise_var,
    const std::function<std::vector<cplx>(const RingQuadrature&)>& profile) {
    model.validate();
    array.validate();
    const int m = array.num_elements;
    const double scale = p_tx * model.gain * model.gain;

    std::vector<cplx> lags;
    if (model.aps_kind == ApsKind::Los || model.angular_spread == 0.0) {
        lags.resize(m);
        for (int d = 0; d < m; ++d)
            lags[d] = std::polar(
                1.0, -2.0 * pi * array.spacing * d * std::cos(model.mean_aoa) / array.wavelength);
    } else {
        // Refine the node count until the worst lag stabilizes.
        int nodes = 128;
        lags = profile(ring_quadrature(model, nodes));
        double achieved = 1.0;
        while (true) {
            if (2 * nodes > kQuadratureMaxNodes)
                throw NumericalIntegrationError("covariance quadrature did not converge",
                                               achieved);
            nodes *= 2;
            auto next = profile(ring_quadrature(model, nodes));
            achieved = 0.0;
            for (int d = 0; d < m; ++d)
                achieved = std::max(achieved, std::abs(next[d] - lags[d]));
            lags = std::move(next);
            if (achieved < kQuadratureRelTol) break;
        }
    }

    HermitianCovariance cov;
    cov.provenance = HermitianCovariance::Provenance::Analytic;
    cov.matrix.resize(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            cov.matrix(r, c) = r >= c ? scale * lags[r - c] : scale * std::conj(lags[c - r]);
    cov.matrix.diagonal().array() += noise_var;
    return cov;
}

}  // namespace

void RingModel::validate() const {
    if (radius < 0.0) throw std::invalid_argument("RingModel: radius must be >= 0");
    if (aps_kind == ApsKind::Los && (radius != 0.0 || angular_spread != 0.0))
        throw std::invalid_argument("RingModel: los requires radius = 0 and angular_spread = 0");
    if (angular_spread < 0.0 || angular_spread >= pi)
        throw std::invalid_argument("RingModel: angular_spread out of range");
    if (num_scatterers < 0) throw std::invalid_argument("RingModel: num_scatterers < 0");
    if (!(gain > 0.0) || !(distance > 0.0))
        throw std::invalid_argument("RingModel: gain and distance must be > 0");
}

RingModel ring_model_for_site(const Eigen::Vector2d& terminal, const Eigen::Vector2d& site,
                              double radius, double wavelength, ApsKind kind) {
    const auto polar = geo::aoa_and_range(site, terminal);
    if (radius >= polar.range)
        throw DegenerateGeometryError("ring_model_for_site: site inside the scatterer ring");
    RingModel model;
    model.center = terminal;
    model.radius = kind == ApsKind::Los ? 0.0 : radius;
    model.mean_aoa = polar.aoa;
    model.angular_spread = kind == ApsKind::Los ? 0.0 : std::asin(radius / polar.range);
    model.gain = wavelength / (4.0 * pi * polar.range);
    model.distance = polar.range;
    model.aps_kind = kind;
    return model;
}

double aps_ring(double gamma, double theta, double gamma_max) {
    const double off = gamma - theta;
    if (std::abs(off) >= gamma_max) return 0.0;
    return 2.0 / std::sqrt(gamma_max * gamma_max - off * off);
}

RingQuadrature ring_quadrature(const RingModel& model, int nodes) {
    // v = atanh(offset / gamma_max) flattens the mu_ring^2 measure exactly, so
    // the weights reduce to the Gauss-Legendre weights times p^2.
    std::vector<double> x, w;
    legendre_rule(nodes, x, w);
    RingQuadrature q;
    q.offsets.resize(nodes);
    q.weights.resize(nodes);
    double total = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double v = kRingTruncationV * x[j];
        q.offsets[j] = model.angular_spread * std::tanh(v);
        const double p = visibility_at(model, q.offsets[j]);
        q.weights[j] = w[j] * p * p;
        total += q.weights[j];
    }
    for (auto& wj : q.weights) wj /= total;
    return q;
}

double aps_value(const RingModel& model, double gamma) {
    if (model.angular_spread <= 0.0) return 0.0;
    const double mu = aps_ring(gamma, model.mean_aoa, model.angular_spread);
    if (mu == 0.0) return 0.0;
    // c^2 = 1 / integral of mu^2 p^2 over the truncated support; in the v
    // variable that integrand is the constant 4 / gamma_max times p^2.
    std::vector<double> x, w;
    legendre_rule(512, x, w);
    double integral = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double off = model.angular_spread * std::tanh(kRingTruncationV * x[j]);
        const double p = visibility_at(model, off);
        integral += w[j] * kRingTruncationV * 4.0 / model.angular_spread * p * p;
    }
    const double c = 1.0 / std::sqrt(integral);
    return model.gain * c * mu * visibility_at(model, gamma - model.mean_aoa);
}

bool HermitianCovariance::is_hermitian(double tol) const {
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

double HermitianCovariance::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

ChannelSnapshot synth_exact(const RingModel& model, const geo::UlaConfig& array, double p_tx,
                            double noise_var, std::span<const double> extra_phases, Rng& rng) {
    model.validate();
    array.validate();
    const int m = array.num_elements;
    const std::size_t k = model.scatterer_angles.size();
    if (!extra_phases.empty() && extra_phases.size() != k)
        throw std::invalid_argument("synth_exact: phase list size mismatch");

    ChannelSnapshot snap;
    snap.clean = Eigen::VectorXcd::Zero(m);
    const double amp_scale = std::sqrt(p_tx / std::max<std::size_t>(k, 1));
    for (std::size_t s = 0; s < k; ++s) {
        const double beta = model.scatterer_angles[s];
        const Eigen::Vector2d scat =
            model.center + model.radius * Eigen::Vector2d{std::cos(beta), std::sin(beta)};
        const double leg1 = (scat - model.center).norm();
        const double phi = extra_phases.empty() ? 0.0 : extra_phases[s];
        for (int i = 0; i < m; ++i) {
            const double leg2 = (array.element_position(i) - scat).norm();
            if (leg2 < geo::kPositionEps)
                throw DegeneratePathError("synth_exact: scatterer coincides with an element");
            const double d = leg1 + leg2;
            if (d < geo::kPositionEps)
                throw DegeneratePathError("synth_exact: zero path length");
            const double friis = array.wavelength / (4.0 * pi * d);
            snap.clean[i] += amp_scale * friis * std::polar(1.0, -2.0 * pi * d / array.wavelength + phi);
        }
    }
    snap.values = snap.clean;
    if (noise_var > 0.0) {
        const double sigma = std::sqrt(noise_var);
        for (int i = 0; i < m; ++i) snap.values[i] += sigma * rng.cnormal();
    }
    return snap;
}

ChannelSnapshot synth_farfield(const RingModel& model, const geo::UlaConfig& array, double p_tx,
                               double noise_var, std::span<const double> aoas,
                               std::span<const double> phases, Rng& rng, bool force) {
    model.validate();
    array.validate();
    if (!force && !array.far_field(model.distance, model.radius))
        throw FarFieldPreconditionError("synth_farfield: configuration is not far-field");
    if (aoas.size() != phases.size())
        throw std::invalid_argument("synth_farfield: aoas/phases size mismatch");

    const int m = array.num_elements;
    const std::size_t k = aoas.size();
    const double amp = model.gain * std::sqrt(p_tx / std::max<std::size_t>(k, 1));
    ChannelSnapshot snap;
    snap.clean = Eigen::VectorXcd::Zero(m);
    for (std::size_t s = 0; s < k; ++s) {
        const double step = -2.0 * pi * array.spacing * std::cos(aoas[s]) / array.wavelength;
        for (int i = 0; i < m; ++i)
            snap.clean[i] += amp * std::polar(1.0, step * i + phases[s]);
    }
    snap.values = snap.clean;
    if (noise_var > 0.0) {
        const double sigma = std::sqrt(noise_var);
        for (int i = 0; i < m; ++i) snap.values[i] += sigma * rng.cnormal();
    }
    return snap;
}

std::vector<double> draw_path_aoas(const RingModel& model, Rng& rng, int count) {
    std::vector<double> aoas(count);
    if (model.aps_kind == ApsKind::Los || model.angular_spread == 0.0) {
        std::fill(aoas.begin(), aoas.end(), model.mean_aoa);
        return aoas;
    }
    if (!model.visibility) {
        // The S^2 measure is uniform in v.
        for (auto& a : aoas)
            a = model.mean_aoa +
                model.angular_spread * std::tanh(rng.uniform(-kRingTruncationV, kRingTruncationV));
        return aoas;
    }
    // Inverse-CDF table over v with weight p^2.
    constexpr int kGrid = 4096;
    std::vector<double> cdf(kGrid + 1, 0.0);
    for (int j = 1; j <= kGrid; ++j) {
        const double v = -kRingTruncationV + 2.0 * kRingTruncationV * (j - 0.5) / kGrid;
        const double p = visibility_at(model, model.angular_spread * std::tanh(v));
        cdf[j] = cdf[j - 1] + p * p;
    }
    for (auto& a : aoas) {
        const double u = rng.uniform() * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const int j = std::max<int>(1, static_cast<int>(it - cdf.begin()));
        const double frac = (u - cdf[j - 1]) / std::max(cdf[j] - cdf[j - 1], 1e-300);
        const double v = -kRingTruncationV + 2.0 * kRingTruncationV * (j - 1 + frac) / kGrid;
        a = model.mean_aoa + model.angular_spread * std::tanh(v);
    }
    return aoas;
}

std::vector<ChannelSnapshot> draw_snapshots(const RingModel& model, const geo::UlaConfig& array,
                                            double p_tx, double noise_var, int count,
                                            std::uint64_t master_seed, int site_id) {
    std::vector<ChannelSnapshot> snaps;
    snaps.reserve(count);
    const int k = model.aps_kind == ApsKind::Los ? 1 : model.num_scatterers;
    for (int idx = 0; idx < count; ++idx) {
        Rng rng(Rng::derive(master_seed, static_cast<std::uint64_t>(idx)));
        auto aoas = draw_path_aoas(model, rng, k);
        std::vector<double> phases(k);
        for (auto& p : phases) p = rng.uniform(0.0, 2.0 * pi);
        auto snap = synth_farfield(model, array, p_tx, noise_var, aoas, phases, rng, true);
        snap.sounding_index = idx;
        snap.site_id = site_id;
        snaps.push_back(std::move(snap));
    }
    return snaps;
}

std::vector<ChannelSnapshot> synth_los_snapshots(const geo::UlaConfig& array, double theta,
                                                 double rho, double phi, double noise_var,
                                                 int count, std::uint64_t master_seed,
                                                 int site_id) {
    const Eigen::VectorXcd mean = rho * std::polar(1.0, phi) * geo::steering_vector(array, theta);
    const double sigma = std::sqrt(noise_var);
    std::vector<ChannelSnapshot> snaps;
    snaps.reserve(count);
    for (int idx = 0; idx < count; ++idx) {
        Rng rng(Rng::derive(master_seed, static_cast<std::uint64_t>(idx)));
        ChannelSnapshot snap;
        snap.clean = mean;
        snap.values = mean;
        for (int i = 0; i < array.num_elements; ++i) snap.values[i] += sigma * rng.cnormal();
        snap.sounding_index = idx;
        snap.site_id = site_id;
        snaps.push_back(std::move(snap));
    }
    return snaps;
}

HermitianCovariance covariance_analytic(const RingModel& model, const geo::UlaConfig& array,
                                        double p_tx, double noise_var) {
    return assemble_covariance(model, array, p_tx, noise_var, [&](const RingQuadrature& q) {
        return lag_profile_exact(model, array, q);
    });
}

HermitianCovariance covariance_analytic_smallangle(const RingModel& model,
                                                   const geo::UlaConfig& array, double p_tx,
                                                   double noise_var) {
    return assemble_covariance(model, array, p_tx, noise_var, [&](const RingQuadrature& q) {
        return lag_profile_smallangle(model, array, q);
    });
}

HermitianCovariance covariance_sampled(std::span<const ChannelSnapshot> snapshots) {
    if (snapshots.empty())
        throw std::invalid_argument("covariance_sampled: no snapshots");
    const auto m = snapshots.front().values.size();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
    for (const auto& s : snapshots) {
        if (s.values.size() != m)
            throw std::invalid_argument("covariance_sampled: snapshot length mismatch");
        acc.noalias() += s.values * s.values.adjoint();
    }
    acc /= static_cast<double>(snapshots.size());
    HermitianCovariance cov;
    cov.matrix = 0.5 * (acc + acc.adjoint());
    cov.provenance = HermitianCovariance::Provenance::Sampled;
    cov.num_samples = static_cast<int>(snapshots.size());
    return cov;
}

}  // namespace csinfer::ring
