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

namespace csinfer::mlp {

/// Floor inside the feature logarithm.
inline constexpr double kLogEps = 1e-12;

/// DFT codebook: column m has entries exp(-j 2 pi i m / M) / sqrt(M).
Eigen::MatrixXcd dft_codebook(int num_elements);

/// Angular projection -> modulus -> logarithm. Quantization and z-score are
/// applied separately with statistics fit on the training split.
Eigen::VectorXd raw_features(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& codebook);

/// Fixed feature pipeline tail: uniform quantization over the training-set
/// range followed by per-feature z-score.
struct FeatureSpec {
    int quantization_levels = 64;
    double q_min = 0.0;
    double q_max = 1.0;
    Eigen::VectorXd mean;    ///< per feature, fit on training rows only
    Eigen::VectorXd stddev;  ///< population std of the quantized training features

    Eigen::VectorXd apply(const Eigen::VectorXd& raw) const;
    Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& raw_rows) const;
};

/// Fit quantization range and z-score statistics; `raw_rows` is samples-by-features.
FeatureSpec fit_feature_spec(const Eigen::MatrixXd& raw_rows, int quantization_levels = 64);

/// Full pipeline for one channel vector.
Eigen::VectorXd featurize(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& codebook,
                          const FeatureSpec& spec);

/// e = 1 - |w_pred^H h| / |w_opt^H h| with w_opt the best codeword by
/// beamforming gain.
double normalized_inference_error(int predicted_codeword, const Eigen::VectorXcd& h,
                                  const Eigen::MatrixXcd& codebook);

}  // namespace csinfer::mlp
