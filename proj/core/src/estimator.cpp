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

#include "csinfer/estimator.hpp"

#include <cmath>
#include <numbers>

namespace csinfer::est {

using std::numbers::pi;

namespace {

constexpr double kRefineTol = 1e-8;

double spectrum(const geo::UlaConfig& array, const Eigen::VectorXcd& ybar, double theta) {
    return std::norm(geo::steering_vector(array, theta).dot(ybar));
}

/// Golden-section maximization of the beamforming spectrum on [lo, hi].
double golden_section(const geo::UlaConfig& array, const Eigen::VectorXcd& ybar, double lo,
                      double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = spectrum(array, ybar, c);
    double fd = spectrum(array, ybar, d);
    while (b - a > kRefineTol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = spectrum(array, ybar, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = spectrum(array, ybar, d);
        }
    }
    return 0.5 * (a + b);
}

double wrap_angle(double a) {
    while (a > pi) a -= 2.0 * pi;
    while (a <= -pi) a += 2.0 * pi;
    return a;
}

}  // namespace

EstimateResult estimate_los(std::span<const ring::ChannelSnapshot> snapshots,
                            const geo::UlaConfig& array, double p_tx, int grid_size) {
    if (snapshots.empty()) throw std::invalid_argument("estimate_los: no snapshots");
    array.validate();
    const int m = array.num_elements;
    Eigen::VectorXcd ybar = Eigen::VectorXcd::Zero(m);
    for (const auto& s : snapshots) {
        if (s.values.size() != m)
            throw std::invalid_argument("estimate_los: snapshot length mismatch");
        ybar += s.values;
    }
    ybar /= static_cast<double>(snapshots.size());
    if (ybar.norm() < 1e-300) throw NoSignalError("estimate_los: all-zero input");

    const int grid = grid_size > 0 ? grid_size : 4 * m;
    double best_theta = pi / 2.0;
    double best_val = -1.0;
    for (int g = 0; g < grid; ++g) {
        const double theta = pi * (g + 1.0) / (grid + 1.0);
        const double v = spectrum(array, ybar, theta);
        if (v > best_val) {
            best_val = v;
            best_theta = theta;
        }
    }
    const double half_step = pi / (grid + 1.0);
    const double lo = std::max(best_theta - half_step, 1e-9);
    const double hi = std::min(best_theta + half_step, pi - 1e-9);
    const double theta_hat = golden_section(array, ybar, lo, hi);

    const std::complex<double> proj = geo::steering_vector(array, theta_hat).dot(ybar);
    EstimateResult out;
    out.theta_hat = theta_hat;
    out.rho_hat = std::abs(proj);
    out.phi_hat = std::arg(proj);
    out.log_likelihood = std::norm(proj);
    // Friis inversion: rho = sqrt(P_tx M) lambda / (4 pi D).
    out.d_hat = out.rho_hat > 0.0
                    ? std::sqrt(p_tx * m) * array.wavelength / (4.0 * pi * out.rho_hat)
                    : std::numeric_limits<double>::infinity();
    return out;
}

std::vector<SweepRow> mse_vs_crlb_sweep(const EfficiencySweepConfig& config,
                                        std::span<const int> m_list, int trials) {
    const auto frame =
        geo::canonical_frame(config.local1, config.local2, config.remote, config.terminal);
    const double snr = std::pow(10.0, config.snr_db / 10.0);
    const double noise_var = 1.0;
    const double p_tx =
        snr * noise_var * std::pow(4.0 * pi * frame.d_lc / config.wavelength, 2);
    const int k = config.num_snapshots;

    std::vector<SweepRow> rows;
    for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
        const int m = m_list[mi];
        geo::UlaConfig array;
        array.num_elements = m;
        array.wavelength = config.wavelength;
        array.spacing = config.wavelength / 2.0;

        const double rho1 = std::sqrt(p_tx * m) * config.wavelength / (4.0 * pi * frame.d_lc);
        const double rho2 = std::sqrt(p_tx * m) * config.wavelength / (4.0 * pi * frame.d_lc2);

        const std::uint64_t m_seed = Rng::derive(config.master_seed, mi);
        double se_theta = 0.0;
        double se_rm = 0.0;
        for (int t = 0; t < trials; ++t) {
            Rng trial_rng(Rng::derive(m_seed, static_cast<std::uint64_t>(t)));
            const double phi1 = trial_rng.uniform(0.0, 2.0 * pi);
            const std::uint64_t s1 = trial_rng.next_u64();
            auto snaps1 = ring::synth_los_snapshots(array, frame.theta_lc, rho1, phi1, noise_var,
                                                    k, s1, 0);
            const auto est1 = estimate_los(snaps1, array, p_tx);
            se_theta += std::pow(wrap_angle(est1.theta_hat - frame.theta_lc), 2);

            double theta_rm_hat;
            if (config.mode == SweepMode::OneSite) {
                theta_rm_hat = geo::remote_aoa_one_site(est1.d_hat, est1.theta_hat, frame.d0,
                                                        frame.theta0);
            } else {
                const double phi2 = trial_rng.uniform(0.0, 2.0 * pi);
                const std::uint64_t s2 = trial_rng.next_u64();
                auto snaps2 = ring::synth_los_snapshots(array, frame.theta_lc2, rho2, phi2,
                                                       noise_var, k, s2, 1);
                const auto est2 = estimate_los(snaps2, array, p_tx);
                theta_rm_hat = geo::remote_aoa_two_site(est1.theta_hat, est2.theta_hat,
                                                        frame.baseline, frame.d0, frame.theta0);
            }
            se_rm += std::pow(wrap_angle(theta_rm_hat - frame.theta_rm), 2);
        }

        SweepRow row;
        row.num_elements = m;
        row.trials = trials;
        row.snr_db = config.snr_db;
        row.mse_theta_lc = se_theta / trials;
        row.mse_theta_rm = se_rm / trials;
        row.crb_theta_lc =
            crlb::crlb_los_snr_form(m, k, snr, frame.d_lc, frame.theta_lc).theta_lc;
        if (config.mode == SweepMode::OneSite) {
            crlb::OneSiteGeometry g{frame.d_lc, frame.theta_lc, frame.d0, frame.theta0};
            row.crb_theta_rm = crlb::crlb_remote_one_site(g, m, k, snr).total;
        } else {
            crlb::TwoSiteGeometry g{frame.theta_lc, frame.theta_lc2, frame.baseline, frame.d0,
                                    frame.theta0};
            row.crb_theta_rm = crlb::crlb_remote_two_site(g, m, k, snr).propagated;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace csinfer::est
