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

#include "csinfer/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csinfer/errors.hpp"

namespace csinfer::mlp {

using std::numbers::pi;

Eigen::MatrixXcd dft_codebook(int num_elements) {
    if (num_elements < 1) throw std::invalid_argument("dft_codebook: empty codebook");
    const int m = num_elements;
    Eigen::MatrixXcd w(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int col = 0; col < m; ++col)
        for (int row = 0; row < m; ++row)
            w(row, col) = std::polar(scale, -2.0 * pi * row * col / m);
    return w;
}

Eigen::VectorXd raw_features(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& codebook) {
    if (h.size() != codebook.rows())
        throw std::invalid_argument("raw_features: channel/codebook size mismatch");
    return ((codebook.adjoint() * h).cwiseAbs().array() + kLogEps).log().matrix();
}

namespace {

double quantize(double v, double q_min, double q_max, int levels) {
    if (q_max <= q_min) return q_min;
    const double step = (q_max - q_min) / (levels - 1);
    double idx = std::round((std::clamp(v, q_min, q_max) - q_min) / step);
    return q_min + idx * step;
}

}  // namespace

Eigen::VectorXd FeatureSpec::apply(const Eigen::VectorXd& raw) const {
    if (raw.size() != mean.size())
        throw std::invalid_argument("FeatureSpec::apply: feature count mismatch");
    Eigen::VectorXd out(raw.size());
    for (Eigen::Index i = 0; i < raw.size(); ++i) {
        const double q = quantize(raw[i], q_min, q_max, quantization_levels);
        const double s = stddev[i] > 0.0 ? stddev[i] : 1.0;
        out[i] = (q - mean[i]) / s;
    }
    return out;
}

Eigen::MatrixXd FeatureSpec::apply_rows(const Eigen::MatrixXd& raw_rows) const {
    Eigen::MatrixXd out(raw_rows.rows(), raw_rows.cols());
    for (Eigen::Index r = 0; r < raw_rows.rows(); ++r)
        out.row(r) = apply(raw_rows.row(r).transpose()).transpose();
    return out;
}

FeatureSpec fit_feature_spec(const Eigen::MatrixXd& raw_rows, int quantization_levels) {
    if (raw_rows.rows() < 1) throw std::invalid_argument("fit_feature_spec: empty training set");
    if (quantization_levels < 2)
        throw std::invalid_argument("fit_feature_spec: need >= 2 quantization levels");
    FeatureSpec spec;
    spec.quantization_levels = quantization_levels;
    spec.q_min = raw_rows.minCoeff();
    spec.q_max = raw_rows.maxCoeff();

    const Eigen::Index n = raw_rows.rows();
    const Eigen::Index f = raw_rows.cols();
    Eigen::MatrixXd quantized(n, f);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < f; ++c)
            quantized(r, c) =
                quantize(raw_rows(r, c), spec.q_min, spec.q_max, quantization_levels);

    spec.mean = quantized.colwise().mean().transpose();
    // Population std so the normalized training features have std exactly 1.
    spec.stddev = ((quantized.rowwise() - spec.mean.transpose()).array().square().colwise().sum() /
                   static_cast<double>(n))
                      .sqrt()
                      .transpose();
    return spec;
}

Eigen::VectorXd featurize(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& codebook,
                          const FeatureSpec& spec) {
    return spec.apply(raw_features(h, codebook));
}

double normalized_inference_error(int predicted_codeword, const Eigen::VectorXcd& h,
                                  const Eigen::MatrixXcd& codebook) {
    if (predicted_codeword < 0 || predicted_codeword >= codebook.cols())
        throw std::invalid_argument("normalized_inference_error: codeword index out of range");
    const Eigen::VectorXd gains = (codebook.adjoint() * h).cwiseAbs();
    const double best = gains.maxCoeff();
    if (best <= 0.0)
        throw NoSignalError("normalized_inference_error: zero channel");
    return 1.0 - gains[predicted_codeword] / best;
}

}  // namespace csinfer::mlp
