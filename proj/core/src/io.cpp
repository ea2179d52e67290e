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

#include "csinfer/io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

namespace csinfer::io {

std::string git_describe() {
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(
        popen("git describe --always --dirty --tags 2>/dev/null", "r"), pclose);
    if (!pipe) return "unknown";
    std::array<char, 256> buf{};
    std::string out;
    while (fgets(buf.data(), buf.size(), pipe.get())) out += buf.data();
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "unknown" : out;
}

std::string format_double(double v) {
    std::array<char, 40> buf{};
    // %.17g round-trips IEEE doubles exactly.
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

}  // namespace

void write_snapshot_csv(const std::string& path,
                        std::span<const ring::ChannelSnapshot> snapshots) {
    auto out = open_out(path);
    out << "sounding_index,site_id,element_index,re,im\n";
    for (const auto& s : snapshots)
        for (Eigen::Index i = 0; i < s.values.size(); ++i)
            out << s.sounding_index << ',' << s.site_id << ',' << i << ','
                << format_double(s.values[i].real()) << ','
                << format_double(s.values[i].imag()) << '\n';
}

void write_covariance_csv(const std::string& path, const ring::HermitianCovariance& cov) {
    auto out = open_out(path);
    out << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < cov.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < cov.matrix.cols(); ++c)
            out << r << ',' << c << ',' << format_double(cov.matrix(r, c).real()) << ','
                << format_double(cov.matrix(r, c).imag()) << '\n';
}

void write_crlb_scaling_csv(const std::string& path,
                            const harness::CrlbScalingResult& result) {
    auto out = open_out(path);
    out << "m,crb_one_site,crb_two_site,crb_theta_lc\n";
    for (const auto& row : result.rows)
        out << row.num_elements << ',' << format_double(row.crb_one_site) << ','
            << format_double(row.crb_two_site) << ',' << format_double(row.crb_theta_lc)
            << '\n';
}

void write_sweep_csv(const std::string& path, std::span<const est::SweepRow> rows) {
    auto out = open_out(path);
    out << "m,trials,snr_db,mse_theta_lc,crb_theta_lc,mse_theta_rm,crb_theta_rm\n";
    for (const auto& row : rows)
        out << row.num_elements << ',' << row.trials << ',' << format_double(row.snr_db) << ','
            << format_double(row.mse_theta_lc) << ',' << format_double(row.crb_theta_lc) << ','
            << format_double(row.mse_theta_rm) << ',' << format_double(row.crb_theta_rm)
            << '\n';
}

void write_dnn_scaling_csv(const std::string& path, const harness::DnnScalingResult& result) {
    auto out = open_out(path);
    out << "m,num_sites,mean_mse,std_mse\n";
    for (const auto& row : result.rows)
        out << row.num_elements << ',' << row.num_sites << ',' << format_double(row.mean_mse)
            << ',' << format_double(row.std_mse) << '\n';
}

void write_dataset_csv(const std::string& path, const mlp::MlpDataset& dataset) {
    auto out = open_out(path);
    out << "row,target,label";
    for (Eigen::Index f = 0; f < dataset.raw_features.cols(); ++f) out << ",f" << f;
    out << '\n';
    for (Eigen::Index r = 0; r < dataset.raw_features.rows(); ++r) {
        out << r << ',' << format_double(dataset.targets[r]) << ',' << dataset.labels[r];
        for (Eigen::Index f = 0; f < dataset.raw_features.cols(); ++f)
            out << ',' << format_double(dataset.raw_features(r, f));
        out << '\n';
    }
}

void write_summary(const std::string& path, const std::map<std::string, std::string>& config,
                   const std::string& metrics_json) {
    nlohmann::json j;
    j["config"] = config;
    j["git_describe"] = git_describe();
    j["metrics"] = metrics_json.empty() ? nlohmann::json::object()
                                        : nlohmann::json::parse(metrics_json);
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace csinfer::io
