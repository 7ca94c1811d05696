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

#include "risisac/model.hpp"

#include <stdexcept>
#include <string>

namespace risisac {

namespace {

void check_phase(const ChannelSet& ch, const PhaseVector& phi)
{
    if (phi.size() != ch.num_elements())
        throw std::invalid_argument("phase vector length does not match RIS size");
}

}  // namespace

CVec effective_user_channel(const ChannelSet& ch, const PhaseVector& phi, int k)
{
    if (k < 0 || k >= ch.num_users())
        throw std::out_of_range("effective_user_channel: user index " + std::to_string(k));
    check_phase(ch, phi);
    return ch.h_d_k[k] + ch.G.transpose() * phi.values().cwiseProduct(ch.h_r_k[k]);
}

CVec target_response(const ChannelSet& ch, const PhaseVector& phi, int t)
{
    if (t < 0 || t >= ch.num_targets())
        throw std::out_of_range("target index " + std::to_string(t));
    check_phase(ch, phi);
    return ch.h_d_t[t] + ch.G.transpose() * phi.values().cwiseProduct(ch.h_r_t[t]);
}

CMat equivalent_target_channel(const ChannelSet& ch, const PhaseVector& phi, int t)
{
    const CVec u = target_response(ch, phi, t);
    return u * u.transpose();
}

EffectiveChannels effective_channels(const ChannelSet& ch, const PhaseVector& phi)
{
    EffectiveChannels eff;
    for (int k = 0; k < ch.num_users(); ++k)
        eff.h_k.push_back(effective_user_channel(ch, phi, k));
    for (int t = 0; t < ch.num_targets(); ++t)
        eff.H_t.push_back(equivalent_target_channel(ch, phi, t));
    return eff;
}

double radar_snr(const BeamformerMatrix& W, const CMat& H_t, double sigma_r_sq)
{
    if (H_t.cols() != W.rows())
        throw std::invalid_argument("radar_snr: shape mismatch");
    return (H_t * W).squaredNorm() / sigma_r_sq;
}

double weighted_sum_snr(const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch,
                        const ScenarioConfig& config)
{
    double total = 0.0;
    for (int t = 0; t < ch.num_targets(); ++t)
        total += config.weights[t] *
                 radar_snr(W, equivalent_target_channel(ch, phi, t), config.sigma_r_sq);
    return total;
}

double comm_sinr(const BeamformerMatrix& W, const CVec& h_k, int k, double sigma_k_sq)
{
    if (k < 0 || k >= W.cols())
        throw std::out_of_range("comm_sinr: column index " + std::to_string(k));
    const Eigen::RowVectorXcd gains = h_k.transpose() * W;
    const double signal = std::norm(gains(k));
    const double interference = gains.squaredNorm() - signal;
    return signal / (interference + sigma_k_sq);
}

double comm_sinr(const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch, int k,
                 double sigma_k_sq)
{
    return comm_sinr(W, effective_user_channel(ch, phi, k), k, sigma_k_sq);
}

Metrics compute_metrics(const BeamformerMatrix& W, const PhaseVector& phi, const ChannelSet& ch,
                        const ScenarioConfig& config)
{
    Metrics m;
    for (int t = 0; t < ch.num_targets(); ++t) {
        const double snr =
            radar_snr(W, equivalent_target_channel(ch, phi, t), config.sigma_r_sq);
        m.target_snr.push_back(snr);
        m.weighted_sum_snr += config.weights[t] * snr;
    }
    m.weighted_sum_snr_db = linear_to_db(m.weighted_sum_snr);
    for (int k = 0; k < ch.num_users(); ++k) {
        const double s = comm_sinr(W, phi, ch, k, config.sigma_k_sq);
        m.user_sinr.push_back(s);
        m.user_sinr_db.push_back(linear_to_db(s));
    }
    m.power = W.squaredNorm();
    return m;
}

}  // namespace risisac
