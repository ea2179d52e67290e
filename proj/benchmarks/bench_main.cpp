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

#include <benchmark/benchmark.h>

#include "csinfer/estimator.hpp"
#include "csinfer/mlp.hpp"

namespace {

using namespace csinfer;

geo::UlaConfig make_array(int m) {
    geo::UlaConfig array;
    array.num_elements = m;
    array.wavelength = 0.1;
    array.spacing = 0.05;
    return array;
}

void bm_steering_vector(benchmark::State& state) {
    const auto array = make_array(static_cast<int>(state.range(0)));
    double theta = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(geo::steering_vector(array, theta));
        theta += 1e-6;
    }
}
BENCHMARK(bm_steering_vector)->Arg(32)->Arg(128)->Arg(512);

void bm_covariance_analytic(benchmark::State& state) {
    const auto array = make_array(static_cast<int>(state.range(0)));
    auto model = ring::ring_model_for_site({0.0, 100.0}, {0.0, 0.0}, 5.0, 0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(ring::covariance_analytic(model, array, 1e6, 1.0));
}
BENCHMARK(bm_covariance_analytic)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_estimate_los(benchmark::State& state) {
    const auto array = make_array(static_cast<int>(state.range(0)));
    const double p_tx = 1e8;
    const double rho = std::sqrt(p_tx * array.num_elements) * 0.1 / (4.0 * 3.141592653589793 * 100.0);
    const auto snaps = ring::synth_los_snapshots(array, 1.1, rho, 0.4, 1.0, 100, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(est::estimate_los(snaps, array, p_tx));
}
BENCHMARK(bm_estimate_los)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void bm_mlp_train_step(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    Rng rng(11);
    auto model = mlp::MlpModel::create(m, m, 1, mlp::Head::Sigmoid, rng);
    auto adam = mlp::AdamState::init(model);
    Eigen::MatrixXd x(m, 128);
    Eigen::MatrixXd t(1, 128);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = rng.normal();
        t(0, c) = rng.uniform();
    }
    for (auto _ : state) {
        const auto cache = mlp::forward_train(model, x, rng);
        const auto grads = mlp::backward(model, cache, t, mlp::Loss::Mse);
        mlp::adam_step(model, grads, adam, 1e-4);
    }
}
BENCHMARK(bm_mlp_train_step)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
