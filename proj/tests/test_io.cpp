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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "csinfer/io.hpp"

using namespace csinfer;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("csinfer_test_io_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0, 42.0, 3.141592653589793}) {
        const std::string s = io::format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("snapshot csv schema and byte determinism") {
    TempDir tmp;
    std::vector<ring::ChannelSnapshot> snaps(2);
    for (int i = 0; i < 2; ++i) {
        snaps[i].sounding_index = i;
        snaps[i].site_id = 1;
        snaps[i].values = Eigen::VectorXcd(3);
        snaps[i].values << std::complex<double>(0.25, -1.5),
            std::complex<double>(1.0 / 3.0, 0.0), std::complex<double>(0.0, 2.0 + i);
        snaps[i].clean = snaps[i].values;
    }
    const auto p1 = tmp.path / "a.csv";
    const auto p2 = tmp.path / "b.csv";
    io::write_snapshot_csv(p1.string(), snaps);
    io::write_snapshot_csv(p2.string(), snaps);
    const std::string text = slurp(p1);
    CHECK(first_line(text) == "sounding_index,site_id,element_index,re,im");
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);  // header + 2*3 rows
    CHECK(text == slurp(p2));
    CHECK(text.find("0.25,-1.5") != std::string::npos);
}

TEST_CASE("covariance csv schema") {
    TempDir tmp;
    ring::HermitianCovariance cov;
    cov.matrix = Eigen::MatrixXcd(2, 2);
    cov.matrix << std::complex<double>(2.0, 0.0), std::complex<double>(0.5, -0.25),
        std::complex<double>(0.5, 0.25), std::complex<double>(1.0, 0.0);
    const auto p = tmp.path / "cov.csv";
    io::write_covariance_csv(p.string(), cov);
    const std::string text = slurp(p);
    CHECK(first_line(text) == "row,col,re,im");
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    CHECK(text.find("0,1,0.5,-0.25") != std::string::npos);
}

TEST_CASE("scaling and sweep csv schemas") {
    TempDir tmp;
    harness::CrlbScalingResult scaling;
    scaling.rows.push_back({16, 1e-3, 1e-5, 2e-4});
    scaling.rows.push_back({32, 5e-4, 1.2e-6, 1e-4});
    const auto p = tmp.path / "crlb.csv";
    io::write_crlb_scaling_csv(p.string(), scaling);
    CHECK(first_line(slurp(p)) == "m,crb_one_site,crb_two_site,crb_theta_lc");

    std::vector<est::SweepRow> sweep{{32, 1e-5, 9e-6, 2e-5, 1.5e-5, 1000, 20.0}};
    const auto ps = tmp.path / "sweep.csv";
    io::write_sweep_csv(ps.string(), sweep);
    CHECK(first_line(slurp(ps)) ==
          "m,trials,snr_db,mse_theta_lc,crb_theta_lc,mse_theta_rm,crb_theta_rm");

    harness::DnnScalingResult dnn;
    dnn.rows.push_back({16, 2, 3e-4, 5e-5});
    const auto pd = tmp.path / "dnn.csv";
    io::write_dnn_scaling_csv(pd.string(), dnn);
    CHECK(first_line(slurp(pd)) == "m,num_sites,mean_mse,std_mse");
}

TEST_CASE("dataset csv carries target, label and feature columns") {
    TempDir tmp;
    mlp::MlpDataset ds;
    ds.raw_features = Eigen::MatrixXd(2, 3);
    ds.raw_features << 1.0, 2.0, 3.0, 4.0, 5.0, 0.125;
    ds.targets = Eigen::VectorXd(2);
    ds.targets << 0.25, 0.75;
    ds.labels = Eigen::VectorXi(2);
    ds.labels << 7, 9;
    ds.remote_channels = Eigen::MatrixXcd::Zero(2, 1);
    const auto p = tmp.path / "ds.csv";
    io::write_dataset_csv(p.string(), ds);
    const std::string text = slurp(p);
    CHECK(first_line(text) == "row,target,label,f0,f1,f2");
    CHECK(text.find("0,0.25,7,1,2,3") != std::string::npos);
    CHECK(text.find("1,0.75,9,4,5,0.125") != std::string::npos);
}

TEST_CASE("summary json holds config echo, git describe and metrics") {
    TempDir tmp;
    const std::map<std::string, std::string> config{{"snr_db", "10"}, {"m_rm", "64"}};
    const auto p = tmp.path / "summary.json";
    io::write_summary(p.string(), config, R"({"slope": -3.001, "note": "ok"})");
    const auto j = nlohmann::json::parse(slurp(p));
    CHECK(j.at("config").at("snr_db") == "10");
    CHECK(j.at("config").at("m_rm") == "64");
    CHECK(j.at("git_describe").is_string());
    CHECK(j.at("metrics").at("slope") == doctest::Approx(-3.001));
}

TEST_CASE("git_describe yields a non-empty tag") {
    const std::string tag = io::git_describe();
    CHECK(!tag.empty());
}
