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
#include "risisac/phase.hpp"
#include "risisac/scenario.hpp"

#include <vector>

namespace risisac {

/// Stacked dual-function precoder [W_c W_r], M x (K+M). Column j < K
/// carries user j's symbol, the remaining M columns the radar probing streams.
using BeamformerMatrix = CMat;

/// Feasibility slack for power and SINR checks.
inline constexpr double kFeasibilityTol = 1e-8;

struct Metrics {
    std::vector<double> target_snr;  ///< linear, per target
    double weighted_sum_snr = 0.0;
    double weighted_sum_snr_db = 0.0;
    std::vector<double> user_sinr;   ///< linear, per user
    std::vector<double> user_sinr_db;
    double power = 0.0;              ///< ||W||_F^2
};

struct EffectiveChannels {
    std::vector<CVec> h_k;  ///< h_d,k + G^T diag(phi) h_r,k
    std::vector<CMat> H_t;  ///< rank-one round-trip channel per target
};

/// Column form of the cascaded user channel, h_d,k + G^T diag(phi) h_r,k.
CVec effective_user_channel(const ChannelSet& ch, const PhaseVector& phi, int k);

/// One-way BS->target response including the RIS bounce, h_d,t + G^T diag(phi) h_r,t.
CVec target_response(const ChannelSet& ch, const PhaseVector& phi, int t);

/// H_t = u u^T with u = target_response(...). Symmetric, rank <= 1.
CMat equivalent_target_channel(const ChannelSet& ch, const PhaseVector& phi, int t);

EffectiveChannels effective_channels(const ChannelSet& ch, const PhaseVector& phi);

/// Tr(W^H H^H H W) / sigma_r^2.
double radar_snr(const BeamformerMatrix& W, const CMat& H_t, double sigma_r_sq);

double weighted_sum_snr(const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch,
                        const ScenarioConfig& config);

/// |h^T w_k|^2 / (sum_{j != k} |h^T w_j|^2 + sigma^2) for a given effective channel.
double comm_sinr(const BeamformerMatrix& W, const CVec& h_k, int k, double sigma_k_sq);

double comm_sinr(const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch, int k,
                 double sigma_k_sq);

Metrics compute_metrics(const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch,
                        const ScenarioConfig& config);

}  // namespace risisac
