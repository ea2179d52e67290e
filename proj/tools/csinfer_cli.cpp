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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csinfer/harness.hpp"
#include "csinfer/io.hpp"

namespace fs = std::filesystem;
using namespace csinfer;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> mode;
    std::optional<std::string> head;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value config file");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)");
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--mode", args.mode, "one-site or two-site (overrides config)")
        ->check(CLI::IsMember({"one-site", "two-site"}));
    cmd->add_option("--head", args.head, "regression or classification (overrides config)")
        ->check(CLI::IsMember({"regression", "classification"}));
}

harness::ExperimentConfig load_config(const CommonArgs& args) {
    harness::ExperimentConfig cfg = args.config_path.empty()
                                        ? harness::ExperimentConfig{}
                                        : harness::parse_config(args.config_path);
    if (args.seed) cfg.master_seed = *args.seed;
    if (args.mode) cfg.num_sites = *args.mode == "one-site" ? 1 : 2;
    if (args.head)
        cfg.head = *args.head == "classification" ? mlp::DatasetMode::Classification
                                                  : mlp::DatasetMode::Regression;
    if (args.out_dir) cfg.out_dir = *args.out_dir;
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::string out_path(const harness::ExperimentConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

json spec_to_json(const mlp::FeatureSpec& spec) {
    return json{{"quantization_levels", spec.quantization_levels},
                {"q_min", spec.q_min},
                {"q_max", spec.q_max},
                {"mean", std::vector<double>(spec.mean.data(), spec.mean.data() + spec.mean.size())},
                {"stddev", std::vector<double>(spec.stddev.data(),
                                               spec.stddev.data() + spec.stddev.size())}};
}

mlp::FeatureSpec spec_from_json(const json& j) {
    mlp::FeatureSpec spec;
    spec.quantization_levels = j.at("quantization_levels").get<int>();
    spec.q_min = j.at("q_min").get<double>();
    spec.q_max = j.at("q_max").get<double>();
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto stddev = j.at("stddev").get<std::vector<double>>();
    spec.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                  static_cast<Eigen::Index>(mean.size()));
    spec.stddev = Eigen::Map<const Eigen::VectorXd>(stddev.data(),
                                                    static_cast<Eigen::Index>(stddev.size()));
    return spec;
}

int run_snapshot(const CommonArgs& args) {
    const auto cfg = load_config(args);
    Rng rng(Rng::derive(cfg.master_seed, 0x5A9));
    const Eigen::Vector2d terminal = harness::sample_terminal(cfg, rng);
    const int m = cfg.m_list.front();
    geo::UlaConfig array;
    array.num_elements = m;
    array.wavelength = cfg.wavelength;
    array.spacing = cfg.wavelength / 2.0;
    array.origin = cfg.local1;

    const double d_ref = (cfg.remote - cfg.local1).norm();
    const double snr = std::pow(10.0, cfg.snr_db / 10.0);
    const double p_tx = snr * std::pow(4.0 * std::numbers::pi * d_ref / cfg.wavelength, 2);
    const double noise_var = cfg.noiseless ? 0.0 : 1.0;

    std::vector<ring::ChannelSnapshot> snaps;
    if (cfg.channel == harness::ChannelKind::Los) {
        const auto polar = geo::aoa_and_range(cfg.local1, terminal);
        const double g = cfg.wavelength / (4.0 * std::numbers::pi * polar.range);
        const double rho = std::sqrt(p_tx * m) * g;
        snaps = ring::synth_los_snapshots(array, polar.aoa, rho, 0.0, noise_var,
                                          cfg.num_snapshots, Rng::derive(cfg.master_seed, 1));
    } else {
        auto model = ring::ring_model_for_site(terminal, cfg.local1, cfg.ring_radius,
                                               cfg.wavelength);
        model.num_scatterers = cfg.num_scatterers;
        snaps = ring::draw_snapshots(model, array, p_tx, noise_var, cfg.num_snapshots,
                                     Rng::derive(cfg.master_seed, 1));
    }
    io::write_snapshot_csv(out_path(cfg, "snapshots.csv"), snaps);
    json metrics{{"terminal_x", terminal.x()},
                 {"terminal_y", terminal.y()},
                 {"num_snapshots", cfg.num_snapshots},
                 {"m", m}};
    io::write_summary(out_path(cfg, "summary.json"), harness::config_echo(cfg), metrics.dump());
    std::cout << "wrote " << out_path(cfg, "snapshots.csv") << "\n";
    return 0;
}

int run_covariance(const CommonArgs& args) {
    const auto cfg = load_config(args);
    Rng rng(Rng::derive(cfg.master_seed, 0x5A9));
    const Eigen::Vector2d terminal = harness::sample_terminal(cfg, rng);
    const int m = cfg.m_list.front();
    geo::UlaConfig array;
    array.num_elements = m;
    array.wavelength = cfg.wavelength;
    array.spacing = cfg.wavelength / 2.0;
    array.origin = cfg.local1;

    const double d_ref = (cfg.remote - cfg.local1).norm();
    const double snr = std::pow(10.0, cfg.snr_db / 10.0);
    const double p_tx = snr * std::pow(4.0 * std::numbers::pi * d_ref / cfg.wavelength, 2);
    const double noise_var = cfg.noiseless ? 0.0 : 1.0;

    auto model =
        ring::ring_model_for_site(terminal, cfg.local1, cfg.ring_radius, cfg.wavelength);
    model.num_scatterers = cfg.num_scatterers;
    if (cfg.channel == harness::ChannelKind::Los) {
        model.aps_kind = ring::ApsKind::Los;
        model.angular_spread = 0.0;
        model.radius = 0.0;
    }

    const auto analytic = ring::covariance_analytic(model, array, p_tx, noise_var);
    io::write_covariance_csv(out_path(cfg, "covariance_analytic.csv"), analytic);
    const auto snaps = ring::draw_snapshots(model, array, p_tx, noise_var, cfg.num_snapshots,
                                            Rng::derive(cfg.master_seed, 1));
    const auto sampled = ring::covariance_sampled(snaps);
    io::write_covariance_csv(out_path(cfg, "covariance_sampled.csv"), sampled);

    const double rel_err = (analytic.matrix - sampled.matrix).norm() / analytic.matrix.norm();
    json metrics{{"frobenius_rel_error", rel_err},
                 {"min_eigenvalue_analytic", analytic.min_eigenvalue()},
                 {"num_samples", cfg.num_snapshots}};
    io::write_summary(out_path(cfg, "summary.json"), harness::config_echo(cfg), metrics.dump());
    std::cout << "analytic vs sampled Frobenius relative error: " << rel_err << "\n";
    return 0;
}

int run_crlb(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const auto result = harness::run_crlb_scaling(cfg);
    io::write_crlb_scaling_csv(out_path(cfg, "crlb_scaling.csv"), result);
    json metrics{{"slope_one_site", result.slope_one_site.slope},
                 {"slope_two_site", result.slope_two_site.slope},
                 {"residual_one_site", result.slope_one_site.residual},
                 {"residual_two_site", result.slope_two_site.residual}};
    io::write_summary(out_path(cfg, "summary.json"), harness::config_echo(cfg), metrics.dump());
    std::cout << "one-site slope " << result.slope_one_site.slope << ", two-site slope "
              << result.slope_two_site.slope << "\n";
    return 0;
}

int run_scaling(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const auto result = harness::run_dnn_scaling(cfg);
    io::write_dnn_scaling_csv(out_path(cfg, "dnn_scaling.csv"), result);
    json metrics{{"slope_one_site", result.slope_one_site.slope},
                 {"slope_two_site", result.slope_two_site.slope}};
    io::write_summary(out_path(cfg, "summary.json"), harness::config_echo(cfg), metrics.dump());
    std::cout << "one-site MSE slope " << result.slope_one_site.slope << ", two-site MSE slope "
              << result.slope_two_site.slope << "\n";
    return 0;
}

int run_dataset(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const auto ds = harness::generate_dataset(cfg, cfg.dataset_size, cfg.num_sites, cfg.head,
                                              cfg.m_list.front(),
                                              Rng::derive(cfg.master_seed, 0xDA7A));
    io::write_dataset_csv(out_path(cfg, "dataset.csv"), ds);
    json metrics{{"rows", static_cast<int>(ds.size())},
                 {"features", static_cast<int>(ds.raw_features.cols())}};
    io::write_summary(out_path(cfg, "summary.json"), harness::config_echo(cfg), metrics.dump());
    std::cout << "wrote " << ds.size() << " rows to " << out_path(cfg, "dataset.csv") << "\n";
    return 0;
}

int run_train(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const auto ds = harness::generate_dataset(cfg, cfg.dataset_size, cfg.num_sites, cfg.head,
                                              cfg.m_list.front(),
                                              Rng::derive(cfg.master_seed, 0xDA7A));
    mlp::TrainConfig train = cfg.train;
    train.master_seed = Rng::derive(cfg.master_seed, 0x7A11);
    const auto result = mlp::train_and_eval(ds, train);
    const auto single = mlp::train_single_run(ds, train, Rng::derive(train.master_seed, 0));

    json model_file{{"model", json::parse(single.model.to_json())},
                    {"feature_spec", spec_to_json(single.spec)}};
    std::ofstream mf(out_path(cfg, "model.json"));
    mf << model_file.dump(2) << "\n";

    json metrics{{"mean_test_metric", result.mean_metric},
                 {"std_test_metric", result.std_metric},
                 {"mean_accuracy", result.mean_accuracy},
                 {"mean_median_inference_error", result.mean_median_error},
                 {"num_runs", cfg.train.num_runs}};
    io::write_summary(out_path(cfg, "summary.json"), harness::config_echo(cfg), metrics.dump());
    std::cout << "mean test metric " << result.mean_metric << " (std " << result.std_metric
              << ") over " << cfg.train.num_runs << " runs\n";
    return 0;
}

int run_eval(const CommonArgs& args, const std::string& model_path) {
    const auto cfg = load_config(args);
    std::ifstream mf(model_path);
    if (!mf) throw std::runtime_error("cannot open model file: " + model_path);
    std::stringstream ss;
    ss << mf.rdbuf();
    const json model_file = json::parse(ss.str());
    const auto model = mlp::MlpModel::from_json(model_file.at("model").dump());
    const auto spec = spec_from_json(model_file.at("feature_spec"));

    const auto ds = harness::generate_dataset(cfg, cfg.dataset_size, cfg.num_sites, cfg.head,
                                              cfg.m_list.front(),
                                              Rng::derive(cfg.master_seed, 0xE7A1));
    const Eigen::MatrixXd x = spec.apply_rows(ds.raw_features).transpose();
    const Eigen::MatrixXd out = mlp::forward_eval(model, x);

    json metrics;
    if (cfg.head == mlp::DatasetMode::Regression) {
        double mse = 0.0;
        for (Eigen::Index i = 0; i < ds.size(); ++i)
            mse += std::pow(out(0, i) - ds.targets[i], 2);
        mse /= static_cast<double>(ds.size());
        metrics["test_mse"] = mse;
        std::cout << "test MSE " << mse << " on " << ds.size() << " samples\n";
    } else {
        const auto codebook = mlp::dft_codebook(cfg.m_rm);
        int correct = 0;
        std::vector<double> errs;
        for (Eigen::Index i = 0; i < ds.size(); ++i) {
            Eigen::Index pred = 0;
            out.col(i).maxCoeff(&pred);
            if (static_cast<int>(pred) == ds.labels[i]) ++correct;
            const Eigen::VectorXcd h = ds.remote_channels.row(i);
            errs.push_back(
                mlp::normalized_inference_error(static_cast<int>(pred), h, codebook));
        }
        std::sort(errs.begin(), errs.end());
        const double median = errs.empty() ? 0.0
                              : errs.size() % 2 ? errs[errs.size() / 2]
                                                : 0.5 * (errs[errs.size() / 2 - 1] +
                                                         errs[errs.size() / 2]);
        metrics["accuracy"] = static_cast<double>(correct) / static_cast<double>(ds.size());
        metrics["median_inference_error"] = median;
        std::cout << "accuracy " << metrics["accuracy"] << ", median inference error " << median
                  << "\n";
    }
    io::write_summary(out_path(cfg, "summary.json"), harness::config_echo(cfg), metrics.dump());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"remote CSI inference toolkit"};
    app.require_subcommand(1);

    CommonArgs snapshot_args, covariance_args, crlb_args, scaling_args, dataset_args,
        train_args, eval_args;
    std::string model_path = "model.json";

    add_common(app.add_subcommand("snapshot", "synthesize channel snapshots"), snapshot_args);
    add_common(app.add_subcommand("covariance", "analytic and sampled covariance"),
               covariance_args);
    add_common(app.add_subcommand("crlb", "CRLB scaling over the antenna sweep"), crlb_args);
    add_common(app.add_subcommand("scaling", "DNN scaling over the antenna sweep"),
               scaling_args);
    add_common(app.add_subcommand("dataset", "generate a feature/label dataset"), dataset_args);
    add_common(app.add_subcommand("train", "train the MLP and report averaged metrics"),
               train_args);
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on fresh data");
    add_common(eval_cmd, eval_args);
    eval_cmd->add_option("--model", model_path, "model file from the train command");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("snapshot")) return run_snapshot(snapshot_args);
        if (app.got_subcommand("covariance")) return run_covariance(covariance_args);
        if (app.got_subcommand("crlb")) return run_crlb(crlb_args);
        if (app.got_subcommand("scaling")) return run_scaling(scaling_args);
        if (app.got_subcommand("dataset")) return run_dataset(dataset_args);
        if (app.got_subcommand("train")) return run_train(train_args);
        if (app.got_subcommand("eval")) return run_eval(eval_args, model_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
