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

#include <stdexcept>
#include <string>

namespace csinfer {

struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoIntersectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegeneratePathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FarFieldPreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature failed to reach the requested tolerance; carries what it achieved.
struct NumericalIntegrationError : std::runtime_error {
    NumericalIntegrationError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

struct NoSignalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace csinfer
