// SPDX-License-Identifier: Apache-2.0
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
// ------------------------------------------------------------------------

#pragma once

#include "risisac/linalg.hpp"

#include <random>

namespace risisac {

using Rng = std::mt19937_64;

/// Unit-modulus RIS reflection coefficients. Every constructor path ends in
/// an entrywise normalization, so |phi_n| = 1 holds to rounding.
class PhaseVector {
public:
    PhaseVector() = default;
    explicit PhaseVector(Eigen::Index n) : values_(CVec::Ones(n)) {}

    /// Entrywise normalization z_n / |z_n|; zero entries map to 1.
    static PhaseVector retract(const CVec& z);
    static PhaseVector from_angles(const RVec& radians);
    /// I.i.d. phases uniform on [0, 2pi).
    static PhaseVector random(Eigen::Index n, Rng& rng);

    const CVec& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double max_modulus_error() const;

private:
    CVec values_;
};

}  // namespace risisac
