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
#include <span>
#include <string>

#include "csinfer/estimator.hpp"
#include "csinfer/harness.hpp"

namespace csinfer::io {

/// `git describe --always --dirty --tags`, or "unknown" outside a work tree.
std::string git_describe();

/// Shortest decimal round-tripping formatter used by every CSV writer, so
/// outputs are bit-stable across runs.
std::string format_double(double v);

// Fixed CSV schemas; header rows below are the contract.

/// sounding_index,site_id,element_index,re,im
void write_snapshot_csv(const std::string& path,
                        std::span<const ring::ChannelSnapshot> snapshots);

/// row,col,re,im
void write_covariance_csv(const std::string& path, const ring::HermitianCovariance& cov);

/// m,crb_one_site,crb_two_site,crb_theta_lc
void write_crlb_scaling_csv(const std::string& path,
                            const harness::CrlbScalingResult& result);

/// m,trials,snr_db,mse_theta_lc,crb_theta_lc,mse_theta_rm,crb_theta_rm
void write_sweep_csv(const std::string& path, std::span<const est::SweepRow> rows);

/// m,num_sites,mean_mse,std_mse
void write_dnn_scaling_csv(const std::string& path, const harness::DnnScalingResult& result);

/// row,target,label followed by the raw feature columns f0..f{n-1}
void write_dataset_csv(const std::string& path, const mlp::MlpDataset& dataset);

/// summary.json with the config echo, git-describe string, and a free-form
/// metrics/slopes object (JSON text supplied by the caller).
void write_summary(const std::string& path, const std::map<std::string, std::string>& config,
                   const std::string& metrics_json);

}  // namespace csinfer::io
