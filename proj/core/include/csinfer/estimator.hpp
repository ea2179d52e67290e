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

#include <span>
#include <vector>

#include "csinfer/crlb.hpp"
#include "csinfer/one_ring.hpp"

namespace csinfer::est {

struct EstimateResult {
    double theta_hat;       ///< radians, in (0, pi)
    double rho_hat;         ///< array-mean amplitude estimate
    double d_hat;           ///< range from the Friis amplitude inversion, meters
    double phi_hat;         ///< radians
    double log_likelihood;  ///< concentrated objective |e(theta)^H ybar|^2
};

/// Maximum-likelihood LoS fit: coarse beamforming-spectrum search over
/// grid_size angles in (0, pi) (default 4M), golden-section refinement to
/// 1e-8 rad, amplitude/phase from the complex projection.
EstimateResult estimate_los(std::span<const ring::ChannelSnapshot> snapshots,
                            const geo::UlaConfig& array, double p_tx, int grid_size = 0);

enum class SweepMode { OneSite, TwoSite };

struct EfficiencySweepConfig {
    Eigen::Vector2d local1{-100.0, 0.0};
    Eigen::Vector2d local2{100.0, 0.0};
    Eigen::Vector2d remote{0.0, 50.0};
    Eigen::Vector2d terminal{0.0, 100.0};
    double wavelength = 0.1;
    double snr_db = 20.0;      ///< effective receive SNR at local site 1
    int num_snapshots = 100;   ///< K
    SweepMode mode = SweepMode::TwoSite;
    std::uint64_t master_seed = 1;
};

struct SweepRow {
    int num_elements;
    double mse_theta_lc;
    double crb_theta_lc;
    double mse_theta_rm;
    double crb_theta_rm;
    int trials;
    double snr_db;
};

/// Monte Carlo estimator-efficiency sweep: per M, run estimate_los per trial,
/// map through the remote-AoA triangulation, tabulate MSE against the bounds.
std::vector<SweepRow> mse_vs_crlb_sweep(const EfficiencySweepConfig& config,
                                        std::span<const int> m_list, int trials);

}  // namespace csinfer::est
