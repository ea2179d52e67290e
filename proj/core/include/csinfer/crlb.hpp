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
#include <span>
#include <string>
#include <vector>

#include "csinfer/one_ring.hpp"

namespace csinfer::crlb {

enum class ParamTag { Gain, AngularSpread, ThetaLc, DLc, RhoLc, TauLc, Phi };

std::string to_string(ParamTag tag);

struct ParamVector {
    std::vector<ParamTag> tags;
    Eigen::VectorXd values;
};

struct FisherInfo {
    Eigen::MatrixXd matrix;
    ParamVector params;
    int num_samples = 0;
};

/// -K log|C_y| - K tr(C_y^{-1} Chat), constant dropped. Hermitian
/// positive-definite factorization for both determinant and solve.
double log_likelihood(const ring::HermitianCovariance& analytic,
                      const ring::HermitianCovariance& sampled, int num_samples);

/// General complex-Gaussian FIM J_ij = K tr(C^{-1} D_j C^{-1} D_i) with
/// covariance derivatives by Richardson-refined central differences in the
/// one-ring parameters (gain, angular spread, mean AoA).
FisherInfo fim_general(const ring::RingModel& model, const geo::UlaConfig& array, double p_tx,
                       double noise_var, std::span<const ParamTag> tags, int num_samples,
                       double rel_step = 1e-5);

/// Closed-form non-zero-mean LoS FIM over z = [rho, tau, phi]; rho is the
/// full array-mean amplitude (includes the sqrt(M) factor).
FisherInfo fim_los(double rho, double tau, double phi, int num_elements, double noise_var,
                   int num_samples);

struct LosCrlb {
    double rho;
    double tau;
    double d_lc;
    double theta_lc;
};

/// Closed-form LoS bounds. Endfire (sin theta = 0) and M = 1 angle bounds are
/// +infinity markers. CRB(tau) is the (tau,tau) entry of the inverse LoS FIM,
/// 6 sigma^2 / (K rho^2 (M^2-1)).
LosCrlb crlb_los_closed_form(int num_elements, int num_samples, double p_tx, double noise_var,
                             double wavelength, double spacing, double d_lc, double theta_lc);

/// SNR-form shortcut at half-wavelength spacing: SNR = P_tx (lambda/4 pi D)^2 / sigma^2.
LosCrlb crlb_los_snr_form(int num_elements, int num_samples, double snr, double d_lc,
                          double theta_lc);

struct OneSiteGeometry {
    double d_lc;
    double theta_lc;
    double d0;
    double theta0;

    double d_rm() const;
};

struct TwoSiteGeometry {
    double theta_lc;
    double theta_lc2;
    double baseline;  ///< D'_lc, local site 2 at (baseline, 0)
    double d0;
    double theta0;

    double d_lc() const;
    double d_lc2() const;
    double d_rm() const;
};

struct RemoteCrlbOneSite {
    double total;       ///< closed-form CRB_1(theta_rm)
    double m1;          ///< distance-error term, ~ 1/M
    double m2;          ///< angle-error term, ~ 1/M^3
    double propagated;  ///< generic Jacobian^2-weighted propagation (identical algebra)
};

RemoteCrlbOneSite crlb_remote_one_site(const OneSiteGeometry& geom, int num_elements,
                                       int num_samples, double snr);

struct RemoteCrlbTwoSite {
    double total;       ///< closed form under the single-SNR assumption
    double omega1;      ///< theta_lc-error numerator term
    double omega2;      ///< theta_lc'-error numerator term
    double propagated;  ///< generic propagation with per-site SNR
};

/// `snr` is the effective receive SNR at local site 1; the propagation value
/// scales site 2's SNR by the distance ratio squared.
RemoteCrlbTwoSite crlb_remote_two_site(const TwoSiteGeometry& geom, int num_elements,
                                       int num_samples, double snr);

struct PowerLawFit {
    double slope;
    double intercept;
    double residual;  ///< RMS residual of the log-log fit
};

/// Ordinary least squares on (log M, log value).
PowerLawFit fit_power_law(std::span<const std::pair<int, double>> points);

}  // namespace csinfer::crlb
