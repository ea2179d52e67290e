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

#include "csinfer/crlb.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace csinfer::crlb {

using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEndfireEps = 1e-12;

Eigen::LLT<Eigen::MatrixXcd> factorize(const Eigen::MatrixXcd& c) {
    Eigen::LLT<Eigen::MatrixXcd> llt(c);
    if (llt.info() != Eigen::Success)
        throw IllConditionedError("covariance is not positive definite");
    if (llt.rcond() < 1e-12)
        throw IllConditionedError("covariance condition number exceeds 1e12");
    return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
    double acc = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        acc += std::log(std::real(l(i, i)));
    return 2.0 * acc;
}

double& param_ref(ring::RingModel& model, ParamTag tag) {
    switch (tag) {
        case ParamTag::Gain: return model.gain;
        case ParamTag::AngularSpread: return model.angular_spread;
        case ParamTag::ThetaLc: return model.mean_aoa;
        default:
            throw std::invalid_argument("fim_general: unsupported parameter tag " +
                                        to_string(tag));
    }
}

}  // namespace

std::string to_string(ParamTag tag) {
    switch (tag) {
        case ParamTag::Gain: return "g";
        case ParamTag::AngularSpread: return "gamma_max";
        case ParamTag::ThetaLc: return "theta_lc";
        case ParamTag::DLc: return "d_lc";
        case ParamTag::RhoLc: return "rho_lc";
        case ParamTag::TauLc: return "tau_lc";
        case ParamTag::Phi: return "phi";
    }
    return "?";
}

double log_likelihood(const ring::HermitianCovariance& analytic,
                      const ring::HermitianCovariance& sampled, int num_samples) {
    const auto llt = factorize(analytic.matrix);
    const double trace_term = std::real(llt.solve(sampled.matrix).trace());
    return -num_samples * (log_det(llt) + trace_term);
}

FisherInfo fim_general(const ring::RingModel& model, const geo::UlaConfig& array, double p_tx,
                       double noise_var, std::span<const ParamTag> tags, int num_samples,
                       double rel_step) {
    const int n = static_cast<int>(tags.size());
    const auto cov_at = [&](const ring::RingModel& m) {
        return ring::covariance_analytic(m, array, p_tx, noise_var).matrix;
    };
    const auto base = cov_at(model);
    const auto llt = factorize(base);

    std::vector<Eigen::MatrixXcd> solved(n);
    double step = rel_step;
    for (int attempt = 0;; ++attempt) {
        try {
            for (int i = 0; i < n; ++i) {
                ring::RingModel m = model;
                double& z = param_ref(m, tags[i]);
                const double z0 = z;
                const double h = step * std::max(std::abs(z0), 1e-8);
                const auto central = [&](double hh) {
                    z = z0 + hh;
                    Eigen::MatrixXcd plus = cov_at(m);
                    z = z0 - hh;
                    Eigen::MatrixXcd minus = cov_at(m);
                    z = z0;
                    return ((plus - minus) / (2.0 * hh)).eval();
                };
                // One Richardson refinement of the central difference.
                const Eigen::MatrixXcd d = (4.0 * central(h / 2.0) - central(h)) / 3.0;
                solved[i] = llt.solve(d);
            }
            break;
        } catch (const std::exception&) {
            if (attempt >= 5) throw;
            step /= 2.0;
        }
    }

    FisherInfo info;
    info.num_samples = num_samples;
    info.params.tags.assign(tags.begin(), tags.end());
    info.params.values.resize(n);
    {
        ring::RingModel m = model;
        for (int i = 0; i < n; ++i) info.params.values[i] = param_ref(m, tags[i]);
    }
    info.matrix.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = num_samples * std::real((solved[j] * solved[i]).trace());
            info.matrix(i, j) = v;
            info.matrix(j, i) = v;
        }
    return info;
}

FisherInfo fim_los(double rho, double tau, double phi, int num_elements, double noise_var,
                   int num_samples) {
    if (num_elements < 1) throw std::invalid_argument("fim_los: num_elements must be >= 1");
    const double m = num_elements;
    const double k = num_samples;
    FisherInfo info;
    info.num_samples = num_samples;
    info.params.tags = {ParamTag::RhoLc, ParamTag::TauLc, ParamTag::Phi};
    info.params.values.resize(3);
    info.params.values << rho, tau, phi;
    info.matrix = Eigen::Matrix3d::Zero();
    info.matrix(0, 0) = 2.0 * k / noise_var;
    info.matrix(1, 1) = k * rho * rho * (m - 1.0) * (2.0 * m - 1.0) / (3.0 * noise_var);
    info.matrix(1, 2) = info.matrix(2, 1) = (m - 1.0) * k * rho * rho / noise_var;
    info.matrix(2, 2) = 2.0 * k * rho * rho / noise_var;
    return info;
}

LosCrlb crlb_los_closed_form(int num_elements, int num_samples, double p_tx, double noise_var,
                             double wavelength, double spacing, double d_lc, double theta_lc) {
    const double m = num_elements;
    const double k = num_samples;
    const double rho = std::sqrt(p_tx * m) * wavelength / (4.0 * pi * d_lc);

    LosCrlb out;
    out.rho = noise_var / (2.0 * k);
    out.d_lc = 8.0 * pi * pi * std::pow(d_lc, 4) * noise_var /
               (wavelength * wavelength * k * p_tx * m);
    if (num_elements < 2) {
        out.tau = kInf;
        out.theta_lc = kInf;
        return out;
    }
    out.tau = 6.0 * noise_var / (k * rho * rho * (m * m - 1.0));
    const double st = std::sin(theta_lc);
    if (std::abs(st) < kEndfireEps) {
        out.theta_lc = kInf;
        return out;
    }
    const double dtau_dtheta = 2.0 * pi * spacing * st / wavelength;
    out.theta_lc = out.tau / (dtau_dtheta * dtau_dtheta);
    return out;
}

LosCrlb crlb_los_snr_form(int num_elements, int num_samples, double snr, double d_lc,
                          double theta_lc) {
    // sigma^2 = 1, lambda = 1, delta = lambda / 2, P_tx from the SNR definition.
    const double p_tx = snr * std::pow(4.0 * pi * d_lc, 2);
    return crlb_los_closed_form(num_elements, num_samples, p_tx, 1.0, 1.0, 0.5, d_lc, theta_lc);
}

double OneSiteGeometry::d_rm() const {
    const double nx = d_lc * std::cos(theta_lc) - d0 * std::cos(theta0);
    const double ny = d_lc * std::sin(theta_lc) - d0 * std::sin(theta0);
    return std::hypot(nx, ny);
}

double TwoSiteGeometry::d_lc() const {
    return geo::triangulate_terminal(theta_lc, theta_lc2, baseline).norm();
}

double TwoSiteGeometry::d_lc2() const {
    const auto t = geo::triangulate_terminal(theta_lc, theta_lc2, baseline);
    return (t - Eigen::Vector2d{baseline, 0.0}).norm();
}

double TwoSiteGeometry::d_rm() const {
    const auto t = geo::triangulate_terminal(theta_lc, theta_lc2, baseline);
    return (t - Eigen::Vector2d{d0 * std::cos(theta0), d0 * std::sin(theta0)}).norm();
}

RemoteCrlbOneSite crlb_remote_one_site(const OneSiteGeometry& geom, int num_elements,
                                       int num_samples, double snr) {
    constexpr double c1 = 0.5;
    const double c2 = 6.0 / (pi * pi);
    const double m = num_elements;
    const double st = std::sin(geom.theta_lc);

    RemoteCrlbOneSite out{};
    const double psi = geom.theta0 - geom.theta_lc;
    out.m1 = c1 * geom.d0 * geom.d0 * std::sin(psi) * std::sin(psi) / m;
    if (num_elements < 2 || std::abs(st) < kEndfireEps) {
        out.m2 = kInf;
        out.total = kInf;
        out.propagated = kInf;
        return out;
    }
    const double a = geom.d_lc - geom.d0 * std::cos(psi);
    out.m2 = c2 * a * a / (m * (m * m - 1.0) * st * st);
    const double d_rm = geom.d_rm();
    const double prefactor =
        geom.d_lc * geom.d_lc / (std::pow(d_rm, 4) * num_samples * snr);
    out.total = prefactor * (out.m1 + out.m2);

    const auto jac =
        geo::remote_aoa_jacobian_one_site(geom.d_lc, geom.theta_lc, geom.d0, geom.theta0);
    const auto los = crlb_los_snr_form(num_elements, num_samples, snr, geom.d_lc, geom.theta_lc);
    out.propagated = jac.d_dlc * jac.d_dlc * los.d_lc + jac.d_theta * jac.d_theta * los.theta_lc;
    return out;
}

RemoteCrlbTwoSite crlb_remote_two_site(const TwoSiteGeometry& geom, int num_elements,
                                       int num_samples, double snr) {
    const double m = num_elements;
    const double delta = geom.theta_lc - geom.theta_lc2;
    const double st = std::sin(geom.theta_lc);
    const double st2 = std::sin(geom.theta_lc2);

    RemoteCrlbTwoSite out{};
    if (num_elements < 2 || std::abs(std::sin(delta)) < kEndfireEps ||
        std::abs(st) < kEndfireEps || std::abs(st2) < kEndfireEps) {
        out.omega1 = out.omega2 = kInf;
        out.total = kInf;
        out.propagated = kInf;
        return out;
    }

    const double d_lc = geom.d_lc();
    const double d_lc2 = geom.d_lc2();
    const double d_rm = geom.d_rm();
    const double sd = std::sin(geom.theta_lc2 - geom.theta_lc);
    // Propagation-consistent numerator terms (single-SNR form); see the
    // one-site chain for the per-parameter bounds they weight.
    const double w1 = std::pow(d_lc * sd - geom.d0 * std::sin(geom.theta_lc2 - geom.theta0), 2);
    const double psi = geom.theta0 - geom.theta_lc;
    const double w2 =
        geom.d0 * geom.d0 * std::sin(psi) * std::sin(psi) * std::pow(st / st2, 4);
    out.omega1 = w1;
    out.omega2 = w2;
    out.total = 6.0 * d_lc * d_lc * (w1 + w2) /
                (pi * pi * std::pow(d_rm, 4) * m * (m * m - 1.0) * num_samples * snr * sd * sd *
                 st * st);

    const auto jac = geo::remote_aoa_jacobian_two_site(geom.theta_lc, geom.theta_lc2,
                                                       geom.baseline, geom.d0, geom.theta0);
    const double snr2 = snr * (d_lc * d_lc) / (d_lc2 * d_lc2);
    const auto los1 = crlb_los_snr_form(num_elements, num_samples, snr, d_lc, geom.theta_lc);
    const auto los2 = crlb_los_snr_form(num_elements, num_samples, snr2, d_lc2, geom.theta_lc2);
    out.propagated =
        jac.d_theta * jac.d_theta * los1.theta_lc + jac.d_theta2 * jac.d_theta2 * los2.theta_lc;
    return out;
}

PowerLawFit fit_power_law(std::span<const std::pair<int, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [m, v] : points) {
        if (m <= 0 || !(v > 0.0))
            throw std::invalid_argument("fit_power_law: points must be positive");
        const double x = std::log(static_cast<double>(m));
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) throw std::invalid_argument("fit_power_law: M values coincide");
    PowerLawFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (const auto& [m, v] : points) {
        const double r = std::log(v) - (fit.intercept + fit.slope * std::log(double(m)));
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

}  // namespace csinfer::crlb
