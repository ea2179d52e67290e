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
#include <cstdint>
#include <string>
#include <vector>

#include "csinfer/rng.hpp"

namespace csinfer::mlp {

enum class Head { Sigmoid, Softmax };
enum class Loss { Mse, CrossEntropy };

/// Four hidden layers of sizes M_lc, M_lc, 64, 32; LeakyReLU hidden
/// activations, sigmoid or softmax output, inverted dropout with keep 0.7.
struct MlpModel {
    std::vector<int> layer_sizes;  ///< [in, M_lc, M_lc, 64, 32, out]
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    double leaky_slope = 0.01;
    Head head = Head::Sigmoid;
    double dropout_keep = 0.7;

    static MlpModel create(int input_size, int m_lc, int output_size, Head head, Rng& rng);
    void validate() const;
    int num_layers() const { return static_cast<int>(weights.size()); }

    std::string to_json() const;
    static MlpModel from_json(const std::string& text);
};

/// Cached activations of a train-mode forward pass; samples are columns.
struct BatchCache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;    ///< per layer pre-activations
    std::vector<Eigen::MatrixXd> post;   ///< activations after dropout
    std::vector<Eigen::MatrixXd> masks;  ///< hidden-layer dropout scales (0 or 1/keep)
    Eigen::MatrixXd output;
};

Eigen::MatrixXd forward_eval(const MlpModel& model, const Eigen::MatrixXd& inputs);

BatchCache forward_train(const MlpModel& model, const Eigen::MatrixXd& inputs, Rng& rng);

/// Train-mode forward with externally supplied dropout masks (frozen-mask
/// gradient checks).
BatchCache forward_train_masked(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                const std::vector<Eigen::MatrixXd>& masks);

std::vector<Eigen::MatrixXd> draw_dropout_masks(const MlpModel& model, Eigen::Index batch,
                                                Rng& rng);

struct Gradients {
    std::vector<Eigen::MatrixXd> dw;
    std::vector<Eigen::VectorXd> db;
};

/// Exact gradients of the selected loss through the cached pass; batch-mean.
Gradients backward(const MlpModel& model, const BatchCache& cache,
                   const Eigen::MatrixXd& targets, Loss loss);

/// Batch-mean loss value matching backward(); targets are one-hot columns for
/// cross-entropy.
double batch_loss(const Eigen::MatrixXd& output, const Eigen::MatrixXd& targets, Loss loss);

struct AdamState {
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;
    long step = 0;

    static AdamState init(const MlpModel& model);
};

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state, double step_size,
               double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

}  // namespace csinfer::mlp
