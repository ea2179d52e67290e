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
#include <vector>

#include "csinfer/errors.hpp"

namespace csinfer::geo {

/// Coincident-point tolerance in meters.
inline constexpr double kPositionEps = 1e-6;
/// |sin| below this between two rays counts as parallel.
inline constexpr double kParallelEps = 1e-12;

/// Uniform linear array along the boresight direction, element 0 at origin.
struct UlaConfig {
    int num_elements = 1;       ///< M
    double spacing = 0.05;      ///< delta, meters
    double wavelength = 0.1;    ///< lambda, meters
    Eigen::Vector2d origin{0.0, 0.0};
    double boresight = 0.0;     ///< array axis direction, radians

    void validate() const;
    double rayleigh_distance() const {
        const double md = num_elements * spacing;
        return 2.0 * md * md / wavelength;
    }
    /// True iff a terminal at `distance` with scatterer ring `ring_radius`
    /// is in the far field of this array.
    bool far_field(double distance, double ring_radius) const {
        return distance > 10.0 * ring_radius && distance > rayleigh_distance();
    }
    /// Element 0 sits at the origin; higher indices extend opposite the
    /// boresight direction so a source at AoA `a` (measured from boresight)
    /// sees path length grow by i * spacing * cos(a), matching the steering
    /// phase exp(-j 2 pi i spacing cos(a) / wavelength).
    Eigen::Vector2d element_position(int i) const {
        return origin - i * spacing * Eigen::Vector2d{std::cos(boresight), std::sin(boresight)};
    }
};

/// Site/terminal placement; all derived angles and ranges come from the points.
struct SiteLayout {
    std::vector<Eigen::Vector2d> local_sites;
    Eigen::Vector2d remote_site{0.0, 0.0};
    Eigen::Vector2d terminal{0.0, 0.0};

    void validate() const;
};

struct PolarCoord {
    double aoa;    ///< radians, in (-pi, pi]
    double range;  ///< meters
};

/// Unit-norm steering vector, entries exp(-j 2 pi i delta cos(aoa) / lambda) / sqrt(M),
/// i = 0..M-1.
Eigen::VectorXcd steering_vector(const UlaConfig& array, double aoa);

/// Angle and range of `terminal` as seen from `site`.
PolarCoord aoa_and_range(const Eigen::Vector2d& site, const Eigen::Vector2d& terminal);

/// Remote-site AoA from the local polar estimate; remote at D0*(cos t0, sin t0)
/// relative to the local site at the origin.
double remote_aoa_one_site(double d_lc, double theta_lc, double d0, double theta0);

/// Terminal position triangulated from two local AoAs; local site 1 at the
/// origin, local site 2 at (d_lc2, 0).
Eigen::Vector2d triangulate_terminal(double theta_lc, double theta_lc2, double d_lc2);

/// Remote-site AoA from AoAs at two local sites (site 2 at (d_lc2, 0), remote
/// at D0*(cos t0, sin t0)).
double remote_aoa_two_site(double theta_lc, double theta_lc2, double d_lc2, double d0,
                           double theta0);

struct OneSiteJacobian {
    double d_dlc;    ///< d theta_rm / d D_lc
    double d_theta;  ///< d theta_rm / d theta_lc
};

struct TwoSiteJacobian {
    double d_theta;   ///< d theta_rm / d theta_lc
    double d_theta2;  ///< d theta_rm / d theta_lc'
};

OneSiteJacobian remote_aoa_jacobian_one_site(double d_lc, double theta_lc, double d0,
                                             double theta0);

TwoSiteJacobian remote_aoa_jacobian_two_site(double theta_lc, double theta_lc2, double d_lc2,
                                             double d0, double theta0);

/// Map a raw layout into the canonical frame used by the closed forms:
/// local site 1 at the origin, local site 2 on the positive x axis.
struct CanonicalFrame {
    double theta_lc;   ///< AoA of the terminal at local site 1
    double theta_lc2;  ///< AoA at local site 2
    double d_lc;       ///< range local site 1 -> terminal
    double d_lc2;      ///< range local site 2 -> terminal
    double baseline;   ///< D'_lc, local site 1 -> local site 2
    double d0;         ///< local site 1 -> remote
    double theta0;     ///< direction of remote from local site 1
    double d_rm;       ///< remote -> terminal
    double theta_rm;   ///< AoA at the remote site (frame-rotated)
};

CanonicalFrame canonical_frame(const Eigen::Vector2d& local1, const Eigen::Vector2d& local2,
                               const Eigen::Vector2d& remote, const Eigen::Vector2d& terminal);

}  // namespace csinfer::geo
