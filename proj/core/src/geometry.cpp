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

#include "csinfer/geometry.hpp"

#include <cmath>
#include <numbers>

namespace csinfer::geo {

using std::numbers::pi;

void UlaConfig::validate() const {
    if (num_elements < 1) throw std::invalid_argument("UlaConfig: num_elements must be >= 1");
    if (!(spacing > 0.0)) throw std::invalid_argument("UlaConfig: spacing must be > 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("UlaConfig: wavelength must be > 0");
}

void SiteLayout::validate() const {
    for (const auto& s : local_sites) {
        if ((s - terminal).norm() < kPositionEps)
            throw DegenerateGeometryError("terminal coincides with a local site");
    }
    if ((remote_site - terminal).norm() < kPositionEps)
        throw DegenerateGeometryError("terminal coincides with the remote site");
}

Eigen::VectorXcd steering_vector(const UlaConfig& array, double aoa) {
    array.validate();
    const int m = array.num_elements;
    Eigen::VectorXcd e(m);
    const double phase_step = -2.0 * pi * array.spacing * std::cos(aoa) / array.wavelength;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int i = 0; i < m; ++i)
        e[i] = std::polar(scale, phase_step * i);
    return e;
}

PolarCoord aoa_and_range(const Eigen::Vector2d& site, const Eigen::Vector2d& terminal) {
    const Eigen::Vector2d d = terminal - site;
    const double range = d.norm();
    if (range < kPositionEps)
        throw DegenerateGeometryError("aoa_and_range: coincident points");
    return {std::atan2(d.y(), d.x()), range};
}

double remote_aoa_one_site(double d_lc, double theta_lc, double d0, double theta0) {
    const double nx = d_lc * std::cos(theta_lc) - d0 * std::cos(theta0);
    const double ny = d_lc * std::sin(theta_lc) - d0 * std::sin(theta0);
    if (std::hypot(nx, ny) < kPositionEps)
        throw DegenerateGeometryError("remote_aoa_one_site: terminal at the remote site");
    return std::atan2(ny, nx);
}

Eigen::Vector2d triangulate_terminal(double theta_lc, double theta_lc2, double d_lc2) {
    const double s = std::sin(theta_lc2 - theta_lc);
    if (std::abs(s) < kParallelEps)
        throw NoIntersectionError("triangulate_terminal: parallel rays");
    const double t = d_lc2 * std::sin(theta_lc2) / s;
    return {t * std::cos(theta_lc), t * std::sin(theta_lc)};
}

double remote_aoa_two_site(double theta_lc, double theta_lc2, double d_lc2, double d0,
                           double theta0) {
    const Eigen::Vector2d terminal = triangulate_terminal(theta_lc, theta_lc2, d_lc2);
    return remote_aoa_one_site(terminal.norm(), std::atan2(terminal.y(), terminal.x()), d0,
                               theta0);
}

OneSiteJacobian remote_aoa_jacobian_one_site(double d_lc, double theta_lc, double d0,
                                             double theta0) {
    const double nx = d_lc * std::cos(theta_lc) - d0 * std::cos(theta0);
    const double ny = d_lc * std::sin(theta_lc) - d0 * std::sin(theta0);
    const double d_rm_sq = nx * nx + ny * ny;
    if (d_rm_sq < kPositionEps * kPositionEps)
        throw DegenerateGeometryError("remote_aoa_jacobian_one_site: degenerate geometry");
    // d theta_rm / d D_lc = D0 sin(theta0 - theta_lc) / D_rm^2
    // d theta_rm / d theta_lc = D_lc (D_lc - D0 cos(theta0 - theta_lc)) / D_rm^2
    return {d0 * std::sin(theta0 - theta_lc) / d_rm_sq,
            d_lc * (d_lc - d0 * std::cos(theta0 - theta_lc)) / d_rm_sq};
}

TwoSiteJacobian remote_aoa_jacobian_two_site(double theta_lc, double theta_lc2, double d_lc2,
                                             double d0, double theta0) {
    const double delta = theta_lc2 - theta_lc;
    const double sd = std::sin(delta);
    if (std::abs(sd) < kParallelEps)
        throw NoIntersectionError("remote_aoa_jacobian_two_site: parallel rays");
    const double t = d_lc2 * std::sin(theta_lc2) / sd;  // = D_lc
    const double dt_dtheta = t * std::cos(delta) / sd;
    const double dt_dtheta2 = -d_lc2 * std::sin(theta_lc) / (sd * sd);

    const double nx = t * std::cos(theta_lc) - d0 * std::cos(theta0);
    const double ny = t * std::sin(theta_lc) - d0 * std::sin(theta0);
    const double d_rm_sq = nx * nx + ny * ny;
    if (d_rm_sq < kPositionEps * kPositionEps)
        throw DegenerateGeometryError("remote_aoa_jacobian_two_site: terminal at the remote site");

    const double dny_dtheta = t * std::cos(theta_lc) + dt_dtheta * std::sin(theta_lc);
    const double dnx_dtheta = -t * std::sin(theta_lc) + dt_dtheta * std::cos(theta_lc);
    const double d_theta = (dny_dtheta * nx - ny * dnx_dtheta) / d_rm_sq;
    // sin(theta) nx - cos(theta) ny = D0 sin(theta0 - theta_lc)
    const double d_theta2 = dt_dtheta2 * d0 * std::sin(theta0 - theta_lc) / d_rm_sq;
    return {d_theta, d_theta2};
}

CanonicalFrame canonical_frame(const Eigen::Vector2d& local1, const Eigen::Vector2d& local2,
                               const Eigen::Vector2d& remote, const Eigen::Vector2d& terminal) {
    const Eigen::Vector2d base = local2 - local1;
    const double baseline = base.norm();
    if (baseline < kPositionEps)
        throw DegenerateGeometryError("canonical_frame: local sites coincide");
    const double rot = std::atan2(base.y(), base.x());
    const Eigen::Rotation2D<double> r(-rot);
    const Eigen::Vector2d t = r * (terminal - local1);
    const Eigen::Vector2d rm = r * (remote - local1);
    const Eigen::Vector2d l2{baseline, 0.0};

    CanonicalFrame f;
    auto p1 = aoa_and_range({0.0, 0.0}, t);
    auto p2 = aoa_and_range(l2, t);
    auto pr = aoa_and_range({0.0, 0.0}, rm);
    auto pt = aoa_and_range(rm, t);
    f.theta_lc = p1.aoa;
    f.d_lc = p1.range;
    f.theta_lc2 = p2.aoa;
    f.d_lc2 = p2.range;
    f.baseline = baseline;
    f.d0 = pr.range;
    f.theta0 = pr.aoa;
    f.d_rm = pt.range;
    f.theta_rm = pt.aoa;
    return f;
}

}  // namespace csinfer::geo
