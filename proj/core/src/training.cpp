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

#include "csinfer/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace csinfer::mlp {

namespace {

Eigen::MatrixXd one_hot(const Eigen::VectorXi& labels, int classes) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(classes, labels.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) t(labels[i], i) = 1.0;
    return t;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SingleRun train_single_run(const MlpDataset& dataset, const TrainConfig& config,
                           std::uint64_t run_seed) {
    const Eigen::Index n = dataset.size();
    if (n < 2) throw std::invalid_argument("train_single_run: dataset too small");
    const bool classify = dataset.mode == DatasetMode::Classification;
    const int output_size = classify ? dataset.codebook_size : 1;
    if (classify && output_size < 2)
        throw std::invalid_argument("train_single_run: classification needs a codebook size");

    Rng rng(run_seed);

    // Shuffle, then split 90/10.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.uniform_index(i + 1));
        std::swap(order[i], order[j]);
    }
    const Eigen::Index n_train =
        std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(
                                      config.train_fraction * static_cast<double>(n))));
    const Eigen::Index n_test = n - n_train;
    if (n_test < 1) throw std::invalid_argument("train_single_run: empty test split");

    Eigen::MatrixXd raw_train(n_train, dataset.raw_features.cols());
    Eigen::MatrixXd raw_test(n_test, dataset.raw_features.cols());
    for (Eigen::Index i = 0; i < n_train; ++i) raw_train.row(i) = dataset.raw_features.row(order[i]);
    for (Eigen::Index i = 0; i < n_test; ++i)
        raw_test.row(i) = dataset.raw_features.row(order[n_train + i]);

    const FeatureSpec spec = fit_feature_spec(raw_train, 64);
    // Columns are samples from here on.
    const Eigen::MatrixXd x_train = spec.apply_rows(raw_train).transpose();
    const Eigen::MatrixXd x_test = spec.apply_rows(raw_test).transpose();

    Eigen::MatrixXd t_train, t_test;
    Eigen::VectorXi y_test_labels;
    if (classify) {
        Eigen::VectorXi lab_train(n_train);
        y_test_labels.resize(n_test);
        for (Eigen::Index i = 0; i < n_train; ++i) lab_train[i] = dataset.labels[order[i]];
        for (Eigen::Index i = 0; i < n_test; ++i)
            y_test_labels[i] = dataset.labels[order[n_train + i]];
        t_train = one_hot(lab_train, output_size);
        t_test = one_hot(y_test_labels, output_size);
    } else {
        t_train.resize(1, n_train);
        t_test.resize(1, n_test);
        for (Eigen::Index i = 0; i < n_train; ++i) t_train(0, i) = dataset.targets[order[i]];
        for (Eigen::Index i = 0; i < n_test; ++i)
            t_test(0, i) = dataset.targets[order[n_train + i]];
    }

    const Head head = classify ? Head::Softmax : Head::Sigmoid;
    const Loss loss = classify ? Loss::CrossEntropy : Loss::Mse;
    MlpModel model = MlpModel::create(static_cast<int>(x_train.rows()), dataset.m_lc,
                                      output_size, head, rng);
    AdamState adam = AdamState::init(model);

    std::vector<Eigen::Index> batch_order(n_train);
    std::iota(batch_order.begin(), batch_order.end(), Eigen::Index{0});
    const Eigen::Index bs = std::min<Eigen::Index>(config.batch_size, n_train);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (Eigen::Index i = n_train - 1; i > 0; --i) {
            const auto j = static_cast<Eigen::Index>(rng.uniform_index(i + 1));
            std::swap(batch_order[i], batch_order[j]);
        }
        for (Eigen::Index start = 0; start < n_train; start += bs) {
            const Eigen::Index count = std::min(bs, n_train - start);
            Eigen::MatrixXd xb(x_train.rows(), count);
            Eigen::MatrixXd tb(t_train.rows(), count);
            for (Eigen::Index i = 0; i < count; ++i) {
                xb.col(i) = x_train.col(batch_order[start + i]);
                tb.col(i) = t_train.col(batch_order[start + i]);
            }
            const BatchCache cache = forward_train(model, xb, rng);
            const Gradients grads = backward(model, cache, tb, loss);
            adam_step(model, grads, adam, config.step_size, config.beta1, config.beta2,
                      config.epsilon);
        }
    }

    const Eigen::MatrixXd out = forward_eval(model, x_test);
    RunMetrics metrics{};
    if (classify) {
        const Eigen::MatrixXcd codebook = dft_codebook(static_cast<int>(
            dataset.remote_channels.cols()));
        int correct = 0;
        std::vector<double> errs(static_cast<std::size_t>(n_test));
        double err_sum = 0.0;
        for (Eigen::Index i = 0; i < n_test; ++i) {
            Eigen::Index pred = 0;
            out.col(i).maxCoeff(&pred);
            if (pred == y_test_labels[i]) ++correct;
            const Eigen::VectorXcd h = dataset.remote_channels.row(order[n_train + i]);
            const double e =
                normalized_inference_error(static_cast<int>(pred), h, codebook);
            errs[static_cast<std::size_t>(i)] = e;
            err_sum += e;
        }
        metrics.accuracy = static_cast<double>(correct) / static_cast<double>(n_test);
        metrics.median_inference_error = median_of(errs);
        metrics.test_metric = err_sum / static_cast<double>(n_test);
    } else {
        metrics.test_metric = (out - t_test).squaredNorm() / static_cast<double>(n_test);
    }

    return SingleRun{std::move(model), spec, metrics};
}

TrainEvalResult train_and_eval(const MlpDataset& dataset, const TrainConfig& config) {
    if (config.num_runs < 1) throw std::invalid_argument("train_and_eval: num_runs must be >= 1");
    TrainEvalResult result;
    result.runs.resize(static_cast<std::size_t>(config.num_runs));

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, config.num_runs);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= config.num_runs) return;
            const std::uint64_t seed =
                Rng::derive(config.master_seed, static_cast<std::uint64_t>(r));
            result.runs[static_cast<std::size_t>(r)] =
                train_single_run(dataset, config, seed).metrics;
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sum_acc = 0.0, sum_med = 0.0;
    for (const auto& run : result.runs) {
        sum += run.test_metric;
        sum_acc += run.accuracy;
        sum_med += run.median_inference_error;
    }
    const double n = static_cast<double>(config.num_runs);
    result.mean_metric = sum / n;
    result.mean_accuracy = sum_acc / n;
    result.mean_median_error = sum_med / n;
    double ss = 0.0;
    for (const auto& run : result.runs) ss += std::pow(run.test_metric - result.mean_metric, 2);
    result.std_metric = config.num_runs > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return result;
}

}  // namespace csinfer::mlp
