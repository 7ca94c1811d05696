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
#include "risisac/scenario.hpp"

#include <random>

namespace risisac::testing {

inline CMat random_cmat(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5) * scale);
    CMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = {n(rng), n(rng)};
    return m;
}

inline CVec random_cvec(Eigen::Index n, Rng& rng, double scale = 1.0)
{
    return random_cmat(n, 1, rng, scale).col(0);
}

inline RVec random_rvec(Eigen::Index n, Rng& rng)
{
    std::normal_distribution<double> d(0.0, 1.0);
    RVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
    return v;
}

inline double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Random channel realization in normalized units (unit noise, O(1) gains).
inline ChannelSet random_channels(int M, int N, int K, int T, Rng& rng, double ris_scale = 0.5)
{
    ChannelSet ch;
    for (int t = 0; t < T; ++t) {
        ch.h_d_t.push_back(random_cvec(M, rng));
        ch.h_r_t.push_back(random_cvec(N, rng, ris_scale));
    }
    ch.G = random_cmat(N, M, rng, ris_scale);
    for (int k = 0; k < K; ++k) {
        ch.h_d_k.push_back(random_cvec(M, rng));
        ch.h_r_k.push_back(random_cvec(N, rng, ris_scale));
    }
    return ch;
}

inline ScenarioConfig unit_config(int M, int N, int K, int T, double power = 1.0,
                                  double gamma_db = 0.0)
{
    ScenarioConfig c;
    c.num_antennas = M;
    c.num_elements = N;
    c.num_users = K;
    c.power = power;
    c.target_azimuths_deg.assign(T, 0.0);
    for (int t = 0; t < T; ++t) c.target_azimuths_deg[t] = -30.0 + 60.0 * t / std::max(1, T - 1);
    c.weights.assign(T, 1.0);
    c.sigma_r_sq = 1.0;
    c.sigma_k_sq = 1.0;
    c.gamma_db = gamma_db;
    return c;
}

}  // namespace risisac::testing
