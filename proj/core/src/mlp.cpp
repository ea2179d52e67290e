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

#include "csinfer/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csinfer::mlp {

namespace {

Eigen::MatrixXd leaky_relu(const Eigen::MatrixXd& x, double slope) {
    return x.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Eigen::MatrixXd leaky_relu_grad(const Eigen::MatrixXd& pre, double slope) {
    return pre.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

Eigen::MatrixXd apply_head(const Eigen::MatrixXd& pre, Head head) {
    if (head == Head::Sigmoid)
        return pre.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    // Column-wise softmax with max-shift for stability.
    Eigen::MatrixXd out(pre.rows(), pre.cols());
    for (Eigen::Index c = 0; c < pre.cols(); ++c) {
        const Eigen::VectorXd shifted =
            (pre.col(c).array() - pre.col(c).maxCoeff()).exp().matrix();
        out.col(c) = shifted / shifted.sum();
    }
    return out;
}

BatchCache run_forward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                       const std::vector<Eigen::MatrixXd>* masks) {
    model.validate();
    if (inputs.rows() != model.layer_sizes.front())
        throw std::invalid_argument("mlp forward: input size mismatch");
    const int layers = model.num_layers();
    BatchCache cache;
    cache.input = inputs;
    cache.pre.resize(layers);
    cache.post.resize(layers - 1);
    Eigen::MatrixXd act = inputs;
    for (int l = 0; l < layers; ++l) {
        cache.pre[l] = (model.weights[l] * act).colwise() + model.biases[l];
        if (l + 1 < layers) {
            Eigen::MatrixXd post = leaky_relu(cache.pre[l], model.leaky_slope);
            if (masks) post.array() *= (*masks)[l].array();
            cache.post[l] = post;
            act = cache.post[l];
        }
    }
    if (masks) cache.masks = *masks;
    cache.output = apply_head(cache.pre.back(), model.head);
    return cache;
}

}  // namespace

MlpModel MlpModel::create(int input_size, int m_lc, int output_size, Head head, Rng& rng) {
    if (input_size < 1 || m_lc < 1 || output_size < 1)
        throw std::invalid_argument("MlpModel::create: sizes must be positive");
    MlpModel model;
    model.head = head;
    model.layer_sizes = {input_size, m_lc, m_lc, 64, 32, output_size};
    const int layers = static_cast<int>(model.layer_sizes.size()) - 1;
    model.weights.resize(layers);
    model.biases.resize(layers);
    for (int l = 0; l < layers; ++l) {
        const int rows = model.layer_sizes[l + 1];
        const int cols = model.layer_sizes[l];
        const double bound = std::sqrt(1.0 / cols);
        Eigen::MatrixXd w(rows, cols);
        // Row-major fill keeps initialization independent of Eigen's storage order.
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
        model.weights[l] = w;
        model.biases[l] = Eigen::VectorXd::Zero(rows);
    }
    return model;
}

void MlpModel::validate() const {
    if (layer_sizes.size() < 2) throw std::invalid_argument("MlpModel: need >= 2 layers");
    if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size())
        throw std::invalid_argument("MlpModel: weight/bias count mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l])
            throw std::invalid_argument("MlpModel: weight shape mismatch");
        if (biases[l].size() != layer_sizes[l + 1])
            throw std::invalid_argument("MlpModel: bias shape mismatch");
    }
    if (dropout_keep <= 0.0 || dropout_keep > 1.0)
        throw std::invalid_argument("MlpModel: dropout keep probability out of range");
}

Eigen::MatrixXd forward_eval(const MlpModel& model, const Eigen::MatrixXd& inputs) {
    return run_forward(model, inputs, nullptr).output;
}

std::vector<Eigen::MatrixXd> draw_dropout_masks(const MlpModel& model, Eigen::Index batch,
                                                Rng& rng) {
    const int layers = model.num_layers();
    std::vector<Eigen::MatrixXd> masks(layers - 1);
    const double keep = model.dropout_keep;
    const double scale = 1.0 / keep;
    for (int l = 0; l + 1 < layers; ++l) {
        Eigen::MatrixXd m(model.layer_sizes[l + 1], batch);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                m(r, c) = rng.uniform() < keep ? scale : 0.0;
        masks[l] = m;
    }
    return masks;
}

BatchCache forward_train(const MlpModel& model, const Eigen::MatrixXd& inputs, Rng& rng) {
    const auto masks = draw_dropout_masks(model, inputs.cols(), rng);
    return run_forward(model, inputs, &masks);
}

BatchCache forward_train_masked(const MlpModel& model, const Eigen::MatrixXd& inputs,
                                const std::vector<Eigen::MatrixXd>& masks) {
    return run_forward(model, inputs, &masks);
}

double batch_loss(const Eigen::MatrixXd& output, const Eigen::MatrixXd& targets, Loss loss) {
    if (output.rows() != targets.rows() || output.cols() != targets.cols())
        throw std::invalid_argument("batch_loss: shape mismatch");
    const double batch = static_cast<double>(output.cols());
    if (loss == Loss::Mse) return (output - targets).squaredNorm() / batch;
    constexpr double eps = 1e-300;
    double total = 0.0;
    for (Eigen::Index c = 0; c < output.cols(); ++c)
        for (Eigen::Index r = 0; r < output.rows(); ++r)
            if (targets(r, c) != 0.0)
                total -= targets(r, c) * std::log(output(r, c) + eps);
    return total / batch;
}

Gradients backward(const MlpModel& model, const BatchCache& cache,
                   const Eigen::MatrixXd& targets, Loss loss) {
    const int layers = model.num_layers();
    const double batch = static_cast<double>(cache.input.cols());
    Gradients grads;
    grads.dw.resize(layers);
    grads.db.resize(layers);

    Eigen::MatrixXd dpre;
    if (loss == Loss::Mse) {
        if (model.head != Head::Sigmoid)
            throw std::invalid_argument("backward: MSE expects the sigmoid head");
        const Eigen::MatrixXd& o = cache.output;
        dpre = (2.0 / batch) * (o - targets).array() * o.array() * (1.0 - o.array());
    } else {
        if (model.head != Head::Softmax)
            throw std::invalid_argument("backward: cross-entropy expects the softmax head");
        dpre = (cache.output - targets) / batch;
    }

    for (int l = layers - 1; l >= 0; --l) {
        const Eigen::MatrixXd& act_in = l == 0 ? cache.input : cache.post[l - 1];
        grads.dw[l] = dpre * act_in.transpose();
        grads.db[l] = dpre.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd dpost = model.weights[l].transpose() * dpre;
            if (!cache.masks.empty()) dpost.array() *= cache.masks[l - 1].array();
            dpre = dpost.array() * leaky_relu_grad(cache.pre[l - 1], model.leaky_slope).array();
        }
    }
    return grads;
}

AdamState AdamState::init(const MlpModel& model) {
    AdamState state;
    const int layers = model.num_layers();
    state.mw.resize(layers);
    state.vw.resize(layers);
    state.mb.resize(layers);
    state.vb.resize(layers);
    for (int l = 0; l < layers; ++l) {
        state.mw[l] = Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols());
        state.vw[l] = state.mw[l];
        state.mb[l] = Eigen::VectorXd::Zero(model.biases[l].size());
        state.vb[l] = state.mb[l];
    }
    return state;
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state, double step_size,
               double beta1, double beta2, double epsilon) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (int l = 0; l < model.num_layers(); ++l) {
        state.mw[l] = beta1 * state.mw[l] + (1.0 - beta1) * grads.dw[l];
        state.vw[l] =
            beta2 * state.vw[l].array() + (1.0 - beta2) * grads.dw[l].array().square();
        state.mb[l] = beta1 * state.mb[l] + (1.0 - beta1) * grads.db[l];
        state.vb[l] =
            beta2 * state.vb[l].array() + (1.0 - beta2) * grads.db[l].array().square();
        model.weights[l].array() -=
            step_size * (state.mw[l].array() / bc1) / ((state.vw[l].array() / bc2).sqrt() + epsilon);
        model.biases[l].array() -=
            step_size * (state.mb[l].array() / bc1) / ((state.vb[l].array() / bc2).sqrt() + epsilon);
    }
}

std::string MlpModel::to_json() const {
    validate();
    nlohmann::json j;
    j["format"] = "csinfer-mlp-v1";
    j["layer_sizes"] = layer_sizes;
    j["leaky_slope"] = leaky_slope;
    j["dropout_keep"] = dropout_keep;
    j["head"] = head == Head::Sigmoid ? "sigmoid" : "softmax";
    nlohmann::json jw = nlohmann::json::array();
    nlohmann::json jb = nlohmann::json::array();
    for (int l = 0; l < num_layers(); ++l) {
        std::vector<double> flat(weights[l].size());
        // Row-major flattening.
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), weights[l].rows(), weights[l].cols()) = weights[l];
        jw.push_back(flat);
        jb.push_back(std::vector<double>(biases[l].data(), biases[l].data() + biases[l].size()));
    }
    j["weights"] = jw;
    j["biases"] = jb;
    return j.dump();
}

MlpModel MlpModel::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "csinfer-mlp-v1")
        throw std::invalid_argument("MlpModel::from_json: unknown format");
    MlpModel model;
    model.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    model.leaky_slope = j.at("leaky_slope").get<double>();
    model.dropout_keep = j.at("dropout_keep").get<double>();
    model.head = j.at("head").get<std::string>() == "softmax" ? Head::Softmax : Head::Sigmoid;
    const auto& jw = j.at("weights");
    const auto& jb = j.at("biases");
    const int layers = static_cast<int>(model.layer_sizes.size()) - 1;
    if (static_cast<int>(jw.size()) != layers || static_cast<int>(jb.size()) != layers)
        throw std::invalid_argument("MlpModel::from_json: layer count mismatch");
    model.weights.resize(layers);
    model.biases.resize(layers);
    for (int l = 0; l < layers; ++l) {
        const int rows = model.layer_sizes[l + 1];
        const int cols = model.layer_sizes[l];
        const auto flat = jw[l].get<std::vector<double>>();
        if (static_cast<int>(flat.size()) != rows * cols)
            throw std::invalid_argument("MlpModel::from_json: weight size mismatch");
        model.weights[l] =
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(flat.data(), rows, cols);
        const auto bias = jb[l].get<std::vector<double>>();
        if (static_cast<int>(bias.size()) != rows)
            throw std::invalid_argument("MlpModel::from_json: bias size mismatch");
        model.biases[l] = Eigen::Map<const Eigen::VectorXd>(bias.data(), rows);
    }
    model.validate();
    return model;
}

}  // namespace csinfer::mlp
