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

#include <map>
#include <string>
#include <vector>

#include "csinfer/crlb.hpp"
#include "csinfer/estimator.hpp"
#include "csinfer/training.hpp"

namespace csinfer::harness {

enum class ChannelKind { Los, OneRing };

/// Scenario and experiment configuration; defaults reproduce the benchmark
/// layout: local sites (-100,0) and (100,0), remote site (0,50), terminals
/// uniform by area on the upper annular semi-disk 5 m <= r <= 50 m around the
/// remote site.
struct ExperimentConfig {
    Eigen::Vector2d local1{-100.0, 0.0};
    Eigen::Vector2d local2{100.0, 0.0};
    Eigen::Vector2d remote{0.0, 50.0};
    double r_min = 5.0;
    double r_max = 50.0;

    double wavelength = 0.1;
    double ring_radius = 5.0;
    int num_scatterers = 100;
    ChannelKind channel = ChannelKind::OneRing;
    bool noiseless = false;

    double snr_db = 10.0;
    int num_snapshots = 100;  ///< K
    int trials = 1000;        ///< terminal ensemble size for CRLB sweeps
    std::vector<int> m_list{16, 32, 64, 128, 256};
    int m_rm = 64;            ///< remote array / codebook size

    int num_sites = 2;  ///< 1 or 2 local sites
    mlp::DatasetMode head = mlp::DatasetMode::Regression;
    int dataset_size = 10000;
    mlp::TrainConfig train;

    std::uint64_t master_seed = 1;
    std::string out_dir = ".";

    void validate() const;
};

/// Parse a flat `key = value` config file; '#' starts a comment; unknown keys
/// raise ConfigError. Missing keys keep their defaults.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Serializable view of the (effective) configuration for the summary echo.
std::map<std::string, std::string> config_echo(const ExperimentConfig& config);

/// Area-uniform draw on the annular semi-disk around the remote site
/// (upper half-plane): r = sqrt(r_min^2 + u (r_max^2 - r_min^2)), angle
/// uniform on (0, pi).
Eigen::Vector2d sample_terminal(const ExperimentConfig& config, Rng& rng);

/// One dataset row per sampled terminal: local-site channel features
/// (concatenated across sites), regression target theta_rm / pi, and the
/// classification codeword label from the remote DFT codebook.
mlp::MlpDataset generate_dataset(const ExperimentConfig& config, int size, int num_sites,
                                 mlp::DatasetMode mode, int m_lc, std::uint64_t seed);

struct CrlbScalingRow {
    int num_elements;
    double crb_one_site;   ///< ensemble mean of CRB_1(theta_rm)
    double crb_two_site;   ///< ensemble mean of CRB_2(theta_rm)
    double crb_theta_lc;   ///< ensemble mean of the local-angle bound
};

struct CrlbScalingResult {
    std::vector<CrlbScalingRow> rows;
    crlb::PowerLawFit slope_one_site;
    crlb::PowerLawFit slope_two_site;
};

CrlbScalingResult run_crlb_scaling(const ExperimentConfig& config);

struct DnnScalingRow {
    int num_elements;
    int num_sites;
    double mean_mse;
    double std_mse;
};

struct DnnScalingResult {
    std::vector<DnnScalingRow> rows;
    crlb::PowerLawFit slope_one_site;
    crlb::PowerLawFit slope_two_site;
};

/// For each M in config.m_list and each site count in {1, 2}: generate a
/// dataset, run the averaged training protocol, record mean/std test MSE.
DnnScalingResult run_dnn_scaling(const ExperimentConfig& config);

}  // namespace csinfer::harness
