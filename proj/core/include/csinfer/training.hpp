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

#include <vector>

#include "csinfer/features.hpp"
#include "csinfer/mlp.hpp"

namespace csinfer::mlp {

enum class DatasetMode { Regression, Classification };

struct MlpDataset {
    Eigen::MatrixXd raw_features;     ///< samples x features, pre-quantization
    Eigen::VectorXd targets;          ///< regression: AoA / pi
    Eigen::VectorXi labels;           ///< classification: codeword index
    Eigen::MatrixXcd remote_channels; ///< samples x M_rm, for the inference-error metric
    DatasetMode mode = DatasetMode::Regression;
    int m_lc = 0;
    int codebook_size = 0;            ///< classification output size

    Eigen::Index size() const { return raw_features.rows(); }
};

struct TrainConfig {
    double step_size = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 200;
    int batch_size = 128;
    double train_fraction = 0.9;
    int num_runs = 10;
    std::uint64_t master_seed = 1;
    int threads = 0;  ///< parallel runs; 0 = hardware concurrency
};

struct RunMetrics {
    double test_metric;             ///< regression: test MSE; classification: mean e
    double accuracy;                ///< classification top-1 (regression: 0)
    double median_inference_error;  ///< classification only
};

struct TrainEvalResult {
    std::vector<RunMetrics> runs;
    double mean_metric = 0.0;
    double std_metric = 0.0;  ///< sample standard deviation (n-1)
    double mean_accuracy = 0.0;
    double mean_median_error = 0.0;
};

/// Per run: fresh 90/10 split, feature-spec fit on the training split, fresh
/// initialization, Adam training, test metrics; mean and sample std across
/// runs. Fully determined by (dataset, config).
TrainEvalResult train_and_eval(const MlpDataset& dataset, const TrainConfig& config);

/// Single deterministic training run; exposed for the CLI `train` command.
struct SingleRun {
    MlpModel model;
    FeatureSpec spec;
    RunMetrics metrics;
};
SingleRun train_single_run(const MlpDataset& dataset, const TrainConfig& config,
                           std::uint64_t run_seed);

}  // namespace csinfer::mlp
