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

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "csinfer/geometry.hpp"
#include "csinfer/rng.hpp"

namespace csinfer::ring {

enum class ApsKind { ContinuousRing, DiscreteScatterers, Los };

/// One-ring scattering description as seen from one site.
///
/// The S^2 measure of the ring APS is non-integrable at the support
/// endpoints, so every consumer (normalization, covariance quadrature,
/// scatterer-angle sampling) works on the support truncated at
/// |gamma - theta| <= gamma_max * tanh(kRingTruncationV).
struct RingModel {
    Eigen::Vector2d center{0.0, 0.0};  ///< terminal position
    double radius = 0.0;               ///< r_max, meters
    int num_scatterers = 100;          ///< K_sc for discrete synthesis
    std::vector<double> scatterer_angles;  ///< ring position angles (synth_exact)
    ApsKind aps_kind = ApsKind::ContinuousRing;
    std::function<double(double)> visibility;  ///< p(gamma offset); empty = constant 1
    double mean_aoa = 0.0;        ///< theta, radians
    double angular_spread = 0.0;  ///< gamma_max, radians
    double gain = 1.0;            ///< g = lambda / (4 pi D)
    double distance = 1.0;        ///< D, site -> terminal, meters

    void validate() const;
};

/// atanh(1 - 1e-6); endpoint-avoiding truncation of the ring support.
inline constexpr double kRingTruncationV = 7.254329465175874;

/// Ring model for `site` observing a terminal ring centred at `terminal`.
RingModel ring_model_for_site(const Eigen::Vector2d& terminal, const Eigen::Vector2d& site,
                              double radius, double wavelength,
                              ApsKind kind = ApsKind::ContinuousRing);

/// Raw ring angular density mu_ring(gamma) = 2 / sqrt(gamma_max^2 - (gamma-theta)^2);
/// zero outside the support.
double aps_ring(double gamma, double theta, double gamma_max);

/// Composed, rescaled APS S(gamma) with integral of S^2 equal to gain^2 over the
/// truncated support.
double aps_value(const RingModel& model, double gamma);

struct ChannelSnapshot {
    int site_id = 0;
    Eigen::VectorXcd values;  ///< y = sqrt(P_tx) h + n
    Eigen::VectorXcd clean;   ///< sqrt(P_tx) h
    int sounding_index = 0;
};

struct HermitianCovariance {
    enum class Provenance { Analytic, Sampled };
    Eigen::MatrixXcd matrix;
    Provenance provenance = Provenance::Analytic;
    int num_samples = 0;

    bool is_hermitian(double tol = 1e-12) const;
    double min_eigenvalue() const;
};

/// Normalized quadrature over the S^2 measure: sum of weights is 1.
struct RingQuadrature {
    std::vector<double> offsets;  ///< gamma - theta
    std::vector<double> weights;
};

RingQuadrature ring_quadrature(const RingModel& model, int nodes);

/// Exact-path synthesis: per-element path lengths and Friis gains per path,
/// no far-field approximation. Scatterer positions come from
/// model.scatterer_angles on the ring; `extra_phases` adds a per-path phase.
ChannelSnapshot synth_exact(const RingModel& model, const geo::UlaConfig& array, double p_tx,
                            double noise_var, std::span<const double> extra_phases, Rng& rng);

/// Far-field synthesis per the plane-wave sum: equal path gains
/// g / sqrt(K_sc), path AoAs `aoas`, phases `phases`.
ChannelSnapshot synth_farfield(const RingModel& model, const geo::UlaConfig& array, double p_tx,
                               double noise_var, std::span<const double> aoas,
                               std::span<const double> phases, Rng& rng, bool force = false);

/// Draw path AoAs from the normalized S^2 measure of the model.
std::vector<double> draw_path_aoas(const RingModel& model, Rng& rng, int count);

/// Ensemble of snapshots with fresh path angles and phases per sounding index;
/// per-index seeds derive deterministically from `master_seed`.
std::vector<ChannelSnapshot> draw_snapshots(const RingModel& model, const geo::UlaConfig& array,
                                            double p_tx, double noise_var, int count,
                                            std::uint64_t master_seed, int site_id = 0);

/// LoS snapshots with a fixed mean rho * exp(j phi) * e(theta) and white noise.
std::vector<ChannelSnapshot> synth_los_snapshots(const geo::UlaConfig& array, double theta,
                                                 double rho, double phi, double noise_var,
                                                 int count, std::uint64_t master_seed,
                                                 int site_id = 0);

/// Analytic covariance, exact (a)-form quadrature of the S^2 measure.
HermitianCovariance covariance_analytic(const RingModel& model, const geo::UlaConfig& array,
                                        double p_tx, double noise_var);

/// Small-angle (b)/(c)-form: carrier factor times the Fourier-type integral in
/// the offset variable. Cross-check path for covariance_analytic.
HermitianCovariance covariance_analytic_smallangle(const RingModel& model,
                                                   const geo::UlaConfig& array, double p_tx,
                                                   double noise_var);

/// Sample covariance (1/K) sum y y^H; Hermitian by construction.
HermitianCovariance covariance_sampled(std::span<const ChannelSnapshot> snapshots);

}  // namespace csinfer::ring
